#include "pointvec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pointvec/error.hpp"

namespace pv {

namespace {

double cross(const PointD& o, const PointD& a, const PointD& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

Hull convex_hull(const std::vector<PointD>& points) {
    if (points.size() < 3) throw InvalidArgument("convex hull needs at least 3 points");

    const int n = static_cast<int>(points.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&points](int a, int b) {
        if (points[a].x != points[b].x) return points[a].x < points[b].x;
        if (points[a].y != points[b].y) return points[a].y < points[b].y;
        return a < b;
    });
    // Drop exact coordinate duplicates, keeping the lowest original index.
    std::vector<int> uniq;
    uniq.reserve(order.size());
    for (int idx : order) {
        if (!uniq.empty() && points[uniq.back()].x == points[idx].x &&
            points[uniq.back()].y == points[idx].y) {
            continue;
        }
        uniq.push_back(idx);
    }
    if (uniq.size() < 2) throw InvalidArgument("convex hull of identical points is undefined");

    Hull hull;
    if (uniq.size() == 2) {
        hull.indices = {std::min(uniq[0], uniq[1]), std::max(uniq[0], uniq[1])};
        return hull;
    }

    // Monotone chain; strict turns only, so collinear edge points are excluded.
    const int m = static_cast<int>(uniq.size());
    std::vector<int> chain(2 * m);
    int k = 0;
    for (int i = 0; i < m; ++i) {
        while (k >= 2 && cross(points[chain[k - 2]], points[chain[k - 1]], points[uniq[i]]) <= 0.0) --k;
        chain[k++] = uniq[i];
    }
    const int lower = k + 1;
    for (int i = m - 2; i >= 0; --i) {
        while (k >= lower && cross(points[chain[k - 2]], points[chain[k - 1]], points[uniq[i]]) <= 0.0) --k;
        chain[k++] = uniq[i];
    }
    chain.resize(k - 1);  // last point repeats the first

    // Collinear runs can keep only two vertices; a segment degenerates here.
    hull.indices.assign(chain.begin(), chain.end());
    std::sort(hull.indices.begin(), hull.indices.end());
    hull.indices.erase(std::unique(hull.indices.begin(), hull.indices.end()), hull.indices.end());
    return hull;
}

double point_line_distance(const PointD& c, const PointD& a, const PointD& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::sqrt(dx * dx + dy * dy);
    if (len == 0.0) throw InvalidArgument("point_line_distance: line endpoints coincide");
    const double num = std::fabs(dx * (a.y - c.y) - (a.x - c.x) * dy);
    return num / len;
}

std::vector<Defect> convexity_defects(const std::vector<PointD>& points, const Hull& h) {
    std::vector<Defect> out;
    const int n = static_cast<int>(points.size());
    const int hn = static_cast<int>(h.indices.size());
    if (n < 3 || hn < 2) return out;

    constexpr double kZeroDepth = 1e-9;  // below this the point sits on the hull edge
    for (int e = 0; e < hn; ++e) {
        const int ia = h.indices[e];
        const int ib = h.indices[(e + 1) % hn];
        const PointD& a = points[ia];
        const PointD& b = points[ib];
        if (a.x == b.x && a.y == b.y) continue;

        // Contour indices strictly between the edge endpoints, cyclically.
        double best = 0.0;
        int best_idx = -1;
        for (int j = (ia + 1) % n; j != ib; j = (j + 1) % n) {
            const double d = point_line_distance(points[j], a, b);
            if (d > best) {
                best = d;
                best_idx = j;
            }
        }
        if (best_idx >= 0 && best > kZeroDepth) {
            out.push_back({ia, ib, best_idx, best});
        }
    }
    return out;
}

double k_curvature_angle(const std::vector<PointD>& points, int i, int k) {
    const int n = static_cast<int>(points.size());
    if (n < 2 * k + 1) throw InvalidArgument("k_curvature_angle: sequence shorter than 2k+1");
    if (k < 1) throw InvalidArgument("k_curvature_angle: k must be positive");

    const PointD& p = points[((i % n) + n) % n];
    const PointD& prev = points[(((i - k) % n) + n) % n];
    const PointD& next = points[(((i + k) % n) + n) % n];

    const double ux = prev.x - p.x;
    const double uy = prev.y - p.y;
    const double wx = next.x - p.x;
    const double wy = next.y - p.y;
    const double lu = std::sqrt(ux * ux + uy * uy);
    const double lw = std::sqrt(wx * wx + wy * wy);
    if (lu == 0.0 || lw == 0.0) return 180.0;  // coincident points: flat by decision

    const double cosang = std::clamp((ux * wx + uy * wy) / (lu * lw), -1.0, 1.0);
    return std::acos(cosang) * 180.0 / std::numbers::pi;
}

}  // namespace pv
