#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "pointvec/contour.hpp"
#include "pointvec/error.hpp"
#include "pointvec/geometry.hpp"
#include "pointvec/synth.hpp"
#include "support/shapes.hpp"

using namespace pv;

namespace {

double cross3(const PointD& o, const PointD& a, const PointD& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_closed_segment(const PointD& p, const PointD& a, const PointD& b) {
    if (cross3(a, b, p) != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

bool in_closed_triangle(const PointD& p, const PointD& a, const PointD& b, const PointD& c) {
    const double o = cross3(a, b, c);
    if (o == 0.0) return false;  // degenerate; the segment test covers it
    const double s1 = cross3(a, b, p) * (o > 0 ? 1.0 : -1.0);
    const double s2 = cross3(b, c, p) * (o > 0 ? 1.0 : -1.0);
    const double s3 = cross3(c, a, p) * (o > 0 ? 1.0 : -1.0);
    return s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0;
}

// A point is a hull vertex exactly when it is not inside the convex hull of
// the remaining points. For n <= 10 that membership is decided exhaustively:
// containment in any closed triangle of three others, or on any closed
// segment of two others. Integer coordinates keep the arithmetic exact.
std::set<std::pair<double, double>> extreme_points_oracle(const std::vector<PointD>& pts) {
    std::set<std::pair<double, double>> out;
    const int n = static_cast<int>(pts.size());
    for (int p = 0; p < n; ++p) {
        bool covered = false;
        for (int i = 0; i < n && !covered; ++i) {
            if (i == p) continue;
            for (int j = i + 1; j < n && !covered; ++j) {
                if (j == p) continue;
                if (on_closed_segment(pts[p], pts[i], pts[j])) covered = true;
                for (int k = j + 1; k < n && !covered; ++k) {
                    if (k == p) continue;
                    if (in_closed_triangle(pts[p], pts[i], pts[j], pts[k])) covered = true;
                }
            }
        }
        if (!covered) out.emplace(pts[p].x, pts[p].y);
    }
    return out;
}

std::vector<PointD> to_pointd(const std::vector<PointI>& pts) {
    std::vector<PointD> out;
    out.reserve(pts.size());
    for (const PointI& p : pts) out.push_back({double(p.x), double(p.y)});
    return out;
}

}  // namespace

TEST_CASE("convex hull keeps square corners and drops the interior point") {
    const std::vector<PointD> pts = {{0, 0}, {10, 0}, {10, 10}, {0, 10}, {5, 5}};
    const Hull h = convex_hull(pts);
    CHECK(h.indices == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("convex hull of collinear points degenerates to the two endpoints") {
    const std::vector<PointD> pts = {{0, 0}, {2, 1}, {4, 2}, {6, 3}, {8, 4}};
    const Hull h = convex_hull(pts);
    REQUIRE(h.indices.size() == 2);
    CHECK(pts[h.indices[0]].x == 0.0);
    CHECK(pts[h.indices[1]].x == 8.0);
}

TEST_CASE("convex hull rejects an all-identical point set") {
    const std::vector<PointD> pts = {{3, 3}, {3, 3}, {3, 3}};
    CHECK_THROWS_AS(convex_hull(pts), InvalidArgument);
}

TEST_CASE("convex hull matches the exhaustive extreme-point oracle on 1000 random sets") {
    SplitMix64 rng(4242);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 3 + rng.next_int(0, 7);
        std::vector<PointD> pts;
        std::set<std::pair<int, int>> used;
        while (static_cast<int>(pts.size()) < n) {
            const int x = rng.next_int(0, 12);
            const int y = rng.next_int(0, 12);
            if (used.emplace(x, y).second) pts.push_back({double(x), double(y)});
        }

        const Hull h = convex_hull(pts);
        std::set<std::pair<double, double>> got;
        for (int idx : h.indices) got.emplace(pts[idx].x, pts[idx].y);
        if (got != extreme_points_oracle(pts)) {
            ++mismatches;
            CAPTURE(trial);
            CHECK(got == extreme_points_oracle(pts));
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("every input point passes the half-plane test for every hull edge") {
    SplitMix64 rng(555);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<PointD> pts;
        const int n = 5 + rng.next_int(0, 60);
        for (int i = 0; i < n; ++i) {
            pts.push_back({rng.next_double() * 100.0, rng.next_double() * 100.0});
        }
        const Hull h = convex_hull(pts);
        if (h.indices.size() < 3) continue;

        // For a random cloud the indices follow input order, not the hull
        // walk, so order the vertices around their centroid before treating
        // consecutive pairs as edges; then require every point on (or within
        // 1e-9 of) the inner side of each edge.
        std::vector<PointD> verts;
        PointD center{0.0, 0.0};
        for (int idx : h.indices) {
            verts.push_back(pts[idx]);
            center.x += pts[idx].x;
            center.y += pts[idx].y;
        }
        center.x /= static_cast<double>(verts.size());
        center.y /= static_cast<double>(verts.size());
        std::sort(verts.begin(), verts.end(), [&](const PointD& a, const PointD& b) {
            return std::atan2(a.y - center.y, a.x - center.x) <
                   std::atan2(b.y - center.y, b.x - center.x);
        });

        const int hn = static_cast<int>(verts.size());
        for (int e = 0; e < hn; ++e) {
            const PointD& a = verts[e];
            const PointD& b = verts[(e + 1) % hn];
            for (const PointD& p : pts) {
                CHECK(cross3(a, b, p) >= -1e-9);  // ccw order: inside is the left side
            }
        }
    }
}

TEST_CASE("hull indices walk a traced contour counterclockwise in the y-up frame") {
    const Blob b = shapes::blob_from(120, 120, shapes::palm(60, 62, 90.0, 0.8));
    const std::vector<PointD> pts = resample(trace_contour(b), 128);
    const Hull h = convex_hull(pts);
    REQUIRE(h.indices.size() >= 3);
    CHECK(std::is_sorted(h.indices.begin(), h.indices.end()));

    // Reading the stored coordinates as y-up, a counterclockwise walk has a
    // positive shoelace sum.
    double area2_y_up = 0.0;
    const int hn = static_cast<int>(h.indices.size());
    for (int e = 0; e < hn; ++e) {
        const PointD& a = pts[h.indices[e]];
        const PointD& c = pts[h.indices[(e + 1) % hn]];
        area2_y_up += a.x * c.y - c.x * a.y;
    }
    CHECK(area2_y_up > 0.0);
}

TEST_CASE("point to line distance matches hand-worked values") {
    CHECK(point_line_distance({0, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
    CHECK(point_line_distance({2, 2}, {0, 0}, {4, 4}) == doctest::Approx(0.0));
    CHECK(std::fabs(point_line_distance({3, 4}, {0, 0}, {10, 0}) - 4.0) <= 1e-9);
    // |dx*(ay-cy) - (ax-cx)*dy| / len with a=(0,0), b=(3,3), c=(1,2):
    // |3*(-2) - (-1)*3| / sqrt(18) = 3/sqrt(18)
    CHECK(std::fabs(point_line_distance({1, 2}, {0, 0}, {3, 3}) - 3.0 / std::sqrt(18.0)) <= 1e-9);
    CHECK_THROWS_AS(point_line_distance({1, 1}, {2, 3}, {2, 3}), InvalidArgument);
}

TEST_CASE("point to line distance is symmetric in the endpoints and translation invariant") {
    SplitMix64 rng(31);
    for (int i = 0; i < 300; ++i) {
        const PointD c{rng.next_double() * 50, rng.next_double() * 50};
        const PointD a{rng.next_double() * 50, rng.next_double() * 50};
        const PointD b{a.x + 1.0 + rng.next_double() * 20, a.y + rng.next_double() * 20};
        const double d = point_line_distance(c, a, b);
        CHECK(std::fabs(point_line_distance(c, b, a) - d) <= 1e-9);

        const double tx = rng.next_double() * 40 - 20;
        const double ty = rng.next_double() * 40 - 20;
        const double dt = point_line_distance({c.x + tx, c.y + ty}, {a.x + tx, a.y + ty},
                                              {b.x + tx, b.y + ty});
        CHECK(std::fabs(dt - d) <= 1e-9);
    }
}

TEST_CASE("a rasterized disc has no defects deeper than one pixel") {
    const Blob b = shapes::blob_from(64, 64, shapes::disc(32, 32, 20));
    const std::vector<PointD> pts = to_pointd(trace_contour(b).points);
    const Hull h = convex_hull(pts);
    for (const Defect& d : convexity_defects(pts, h)) {
        CHECK(d.depth <= 1.0);
    }
}

TEST_CASE("a rectangular notch produces one defect with its floor as the far point") {
    // Side-20 square with a 4-wide, 5-deep notch cut into the top edge.
    const std::vector<PointD> pts = {{0, 0},   {20, 0},  {20, 20}, {12, 20},
                                     {12, 15}, {8, 15},  {8, 20},  {0, 20}};
    const Hull h = convex_hull(pts);
    CHECK(h.indices == std::vector<int>{0, 1, 2, 7});

    const auto defects = convexity_defects(pts, h);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].start_idx == 2);
    CHECK(defects[0].end_idx == 7);
    CHECK(defects[0].depth == doctest::Approx(5.0));
    CHECK(pts[defects[0].far_idx].y == doctest::Approx(15.0));  // notch floor
    CHECK(defects[0].far_idx == 4);  // the tie between the two floor corners breaks low
}

TEST_CASE("a two-finger V yields exactly one dominant defect at the valley") {
    const std::vector<PointD> pts = {{20, 40}, {20, 0}, {14, 0}, {10, 25},
                                     {6, 0},   {0, 0},  {0, 40}};
    const Hull h = convex_hull(pts);
    const auto defects = convexity_defects(pts, h);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].depth == doctest::Approx(25.0));
    CHECK(pts[defects[0].far_idx].x == doctest::Approx(10.0));
    CHECK(pts[defects[0].far_idx].y == doctest::Approx(25.0));
}

TEST_CASE("defect depth equals the far point's line distance and bounds its span") {
    const Blob b = shapes::blob_from(130, 130, shapes::palm(65, 68, 90.0, 0.9));
    const std::vector<PointD> pts = resample(trace_contour(b), 128);
    const Hull h = convex_hull(pts);
    const auto defects = convexity_defects(pts, h);
    REQUIRE(!defects.empty());

    const int n = static_cast<int>(pts.size());
    for (const Defect& d : defects) {
        const PointD& a = pts[d.start_idx];
        const PointD& e = pts[d.end_idx];
        CHECK(d.depth == point_line_distance(pts[d.far_idx], a, e));
        CHECK(d.depth > 0.0);
        for (int j = (d.start_idx + 1) % n; j != d.end_idx; j = (j + 1) % n) {
            CHECK(point_line_distance(pts[j], a, e) <= d.depth);
        }
    }
}

TEST_CASE("k-curvature reads flat runs, right angles, and coincident points as expected") {
    const std::vector<PointD> line = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    CHECK(k_curvature_angle(line, 2, 2) == doctest::Approx(180.0));

    const std::vector<PointD> corner = {{0, 10}, {0, 0}, {10, 0}};
    CHECK(k_curvature_angle(corner, 1, 1) == doctest::Approx(90.0));

    const std::vector<PointD> pinched = {{5, 5}, {5, 5}, {9, 9}};
    CHECK(k_curvature_angle(pinched, 1, 1) == doctest::Approx(180.0));

    CHECK_THROWS_AS(k_curvature_angle(corner, 0, 5), InvalidArgument);  // shorter than 2k+1
}

TEST_CASE("k-curvature of a regular 128-gon probed at k=16 is 135 degrees") {
    std::vector<PointD> gon;
    for (int i = 0; i < 128; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / 128.0;
        gon.push_back({100.0 * std::cos(a), 100.0 * std::sin(a)});
    }
    for (int i = 0; i < 128; i += 11) {
        CHECK(std::fabs(k_curvature_angle(gon, i, 16) - 135.0) <= 0.01);
    }
}

TEST_CASE("k-curvature is invariant under scaling and rigid motion") {
    SplitMix64 rng(77);
    std::vector<PointD> pts;
    for (int i = 0; i < 40; ++i) {
        pts.push_back({rng.next_double() * 30, rng.next_double() * 30});
    }
    const double phi = 0.5761;  // 33 degrees
    const double s = 3.7;
    std::vector<PointD> moved;
    for (const PointD& p : pts) {
        moved.push_back({s * (p.x * std::cos(phi) - p.y * std::sin(phi)) + 12.5,
                         s * (p.x * std::sin(phi) + p.y * std::cos(phi)) - 4.25});
    }
    for (int i = 0; i < 40; i += 3) {
        const double a = k_curvature_angle(pts, i, 7);
        const double b = k_curvature_angle(moved, i, 7);
        CHECK(std::fabs(a - b) <= 1e-6);
    }
}
