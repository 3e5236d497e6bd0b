#include "pointvec/contour.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pointvec/error.hpp"

namespace pv {

namespace {

// Step table indexed by chain code. Image coordinates (y grows downward),
// so code 1 (NE, up-right on screen) steps (+1, -1).
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int code_of_step(int dx, int dy) {
    for (int k = 0; k < 8; ++k) {
        if (kDx[k] == dx && kDy[k] == dy) return k;
    }
    throw InvalidArgument("contour points are not 8-neighbors");
}

double signed_shoelace(const std::vector<PointI>& pts) {
    double s = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PointI& a = pts[i];
        const PointI& b = pts[(i + 1) % n];
        s += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
    }
    return s;
}

// Local occupancy bitmap so membership tests are O(1) during the trace.
struct BlobGrid {
    Rect box;
    std::vector<std::uint8_t> cells;

    explicit BlobGrid(const Blob& b) : box(b.bbox) {
        cells.assign(static_cast<std::size_t>(box.w) * box.h, 0);
        for (const PointI& p : b.pixels) {
            cells[static_cast<std::size_t>(p.y - box.y) * box.w + (p.x - box.x)] = 1;
        }
    }
    bool at(int x, int y) const {
        if (x < box.x || x >= box.x + box.w || y < box.y || y >= box.y + box.h) return false;
        return cells[static_cast<std::size_t>(y - box.y) * box.w + (x - box.x)] != 0;
    }
};

}  // namespace

Contour trace_contour(const Blob& b) {
    if (b.pixels.empty()) throw InvalidArgument("blob has no pixels");

    // Topmost, then leftmost pixel; its west neighbor is guaranteed outside.
    PointI start = b.pixels.front();
    for (const PointI& p : b.pixels) {
        if (p.y < start.y || (p.y == start.y && p.x < start.x)) start = p;
    }

    Contour out;
    if (b.pixels.size() == 1) {
        out.points.push_back(start);
        return out;
    }

    const BlobGrid grid(b);

    // From current pixel c with backtrack b (last outside pixel visited),
    // sweep the Moore neighborhood clockwise starting just past b; the first
    // blob pixel is the next boundary point, and the neighbor inspected just
    // before it becomes the new backtrack.
    auto moore_step = [&grid](PointI c, PointI back, PointI* next, PointI* nback) -> bool {
        const int start_code = code_of_step(back.x - c.x, back.y - c.y);
        PointI prev = back;
        for (int i = 1; i <= 8; ++i) {
            // Clockwise on screen means descending chain codes.
            const int code = ((start_code - i) % 8 + 8) % 8;
            const PointI cand{c.x + kDx[code], c.y + kDy[code]};
            if (grid.at(cand.x, cand.y)) {
                *next = cand;
                *nback = prev;
                return true;
            }
            prev = cand;
        }
        return false;  // isolated pixel
    };

    std::vector<PointI> pts;
    pts.push_back(start);

    PointI back{start.x - 1, start.y};
    PointI cur = start;
    PointI next, nback;
    if (!moore_step(cur, back, &next, &nback)) {
        out.points = pts;
        return out;
    }
    const PointI first_next = next;

    // Stop when the walk re-enters the start and would repeat its first move;
    // a start pixel revisited mid-boundary (narrow waist) is kept and passed.
    const std::size_t cap = 4 * b.pixels.size() + 16;
    std::size_t steps = 0;
    for (;;) {
        if (next == start) {
            PointI peek, pback;
            if (!moore_step(start, nback, &peek, &pback)) break;
            if (peek == first_next) break;
        }
        pts.push_back(next);
        cur = next;
        back = nback;
        if (!moore_step(cur, back, &next, &nback)) break;
        if (++steps > cap) throw InvalidArgument("contour trace did not terminate");
    }

    // Canonical orientation: counterclockwise in a y-up frame, which makes the
    // signed shoelace sum nonnegative on these y-down coordinates.
    if (signed_shoelace(pts) < 0.0) {
        std::reverse(pts.begin() + 1, pts.end());
    }

    out.points = std::move(pts);
    const std::size_t n = out.points.size();
    out.chain.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PointI& a = out.points[i];
        const PointI& c = out.points[(i + 1) % n];
        const int code = code_of_step(c.x - a.x, c.y - a.y);
        out.chain.push_back(static_cast<std::uint8_t>(code));
        out.perimeter += (kDx[code] != 0 && kDy[code] != 0) ? std::sqrt(2.0) : 1.0;
    }
    return out;
}

double area(const Contour& c) {
    if (c.points.size() < 3) throw InvalidArgument("area needs a closed contour of at least 3 points");
    return 0.5 * std::fabs(signed_shoelace(c.points));
}

std::pair<Moments, Cog> moments_cog(const Blob& b) {
    if (b.pixels.empty()) throw InvalidArgument("blob has no pixels");
    Moments m;
    for (const PointI& p : b.pixels) {
        m.m00 += 1.0;
        m.m10 += p.x;
        m.m01 += p.y;
    }
    return {m, Cog{m.m10 / m.m00, m.m01 / m.m00}};
}

double polyline_perimeter(const std::vector<PointD>& pts) {
    double len = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PointD& a = pts[i];
        const PointD& b = pts[(i + 1) % n];
        len += std::hypot(b.x - a.x, b.y - a.y);
    }
    return len;
}

std::vector<PointD> resample(const std::vector<PointD>& pts, int n) {
    if (pts.size() < 3) throw InvalidArgument("resample needs at least 3 points");
    if (n < 8) throw InvalidArgument("resample count must be at least 8");
    const double total = polyline_perimeter(pts);
    if (total <= 0.0) throw InvalidArgument("degenerate contour: zero perimeter");

    const std::size_t m = pts.size();
    const double step = total / n;
    std::vector<PointD> out;
    out.reserve(n);

    std::size_t seg = 0;
    double seg_start = 0.0;  // arc length at the start of segment `seg`
    auto seg_len = [&pts, m](std::size_t i) {
        const PointD& a = pts[i];
        const PointD& b = pts[(i + 1) % m];
        return std::hypot(b.x - a.x, b.y - a.y);
    };
    double cur_len = seg_len(0);

    for (int i = 0; i < n; ++i) {
        const double target = step * i;
        while (seg_start + cur_len < target && seg + 1 < m) {
            seg_start += cur_len;
            ++seg;
            cur_len = seg_len(seg);
        }
        const PointD& a = pts[seg];
        const PointD& b = pts[(seg + 1) % m];
        const double t = cur_len > 0.0 ? std::clamp((target - seg_start) / cur_len, 0.0, 1.0) : 0.0;
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return out;
}

std::vector<PointD> resample(const Contour& c, int n) {
    std::vector<PointD> pts;
    pts.reserve(c.points.size());
    for (const PointI& p : c.points) pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    return resample(pts, n);
}

std::string contour_dump(const Contour& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        os << c.points[i].x << " " << c.points[i].y << " "
           << (i < c.chain.size() ? static_cast<int>(c.chain[i]) : -1) << "\n";
    }
    return os.str();
}

}  // namespace pv
