#include "pointvec/annotate.hpp"

#include <cmath>
#include <numbers>

namespace pv {
namespace {

constexpr Rgb kContour{0, 255, 0};
constexpr Rgb kHull{0, 0, 255};
constexpr Rgb kDefect{255, 0, 0};
constexpr Rgb kFingertip{255, 255, 0};
constexpr Rgb kRay{255, 0, 255};
constexpr Rgb kFace{0, 255, 255};

void put(Frame& f, int x, int y, Rgb c) {
    if (f.in_bounds(x, y)) f.set(x, y, c);
}

void draw_line(Frame& f, int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        put(f, x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

int px(double v) { return static_cast<int>(std::lround(v)); }

void draw_cross(Frame& f, int x, int y, int arm, Rgb c) {
    for (int d = -arm; d <= arm; ++d) {
        put(f, x + d, y, c);
        put(f, x, y + d, c);
    }
}

void draw_disc(Frame& f, int cx, int cy, int r, Rgb c) {
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy <= r * r) put(f, cx + dx, cy + dy, c);
        }
    }
}

void draw_polygon(Frame& f, const std::vector<PointD>& pts, Rgb c) {
    const std::size_t n = pts.size();
    if (n < 2) return;
    for (std::size_t i = 0; i < n; ++i) {
        const PointD& a = pts[i];
        const PointD& b = pts[(i + 1) % n];
        draw_line(f, px(a.x), px(a.y), px(b.x), px(b.y), c);
    }
}

void draw_rect(Frame& f, const Rect& r, Rgb c) {
    draw_line(f, r.x, r.y, r.x + r.w - 1, r.y, c);
    draw_line(f, r.x + r.w - 1, r.y, r.x + r.w - 1, r.y + r.h - 1, c);
    draw_line(f, r.x + r.w - 1, r.y + r.h - 1, r.x, r.y + r.h - 1, c);
    draw_line(f, r.x, r.y + r.h - 1, r.x, r.y, c);
}

}  // namespace

Frame annotate(const Frame& src, const FrameResult& result) {
    Frame out = src;
    const PointingDiagnostics& d = result.diag;

    draw_polygon(out, d.resampled, kContour);

    if (d.hull_indices.size() >= 2) {
        const std::size_t n = d.hull_indices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const PointD& a = d.resampled[d.hull_indices[i]];
            const PointD& b = d.resampled[d.hull_indices[(i + 1) % n]];
            draw_line(out, px(a.x), px(a.y), px(b.x), px(b.y), kHull);
        }
    }

    for (const Defect& defect : d.defects) {
        const PointD& far = d.resampled[defect.far_idx];
        draw_cross(out, px(far.x), px(far.y), 3, kDefect);
    }

    if (result.fingertip) {
        const int tx = px(result.fingertip->x);
        const int ty = px(result.fingertip->y);
        draw_disc(out, tx, ty, 3, kFingertip);
        const std::optional<double> angle =
            result.angle_bisector ? result.angle_bisector : result.angle_cog;
        if (angle) {
            const double rad = *angle * std::numbers::pi / 180.0;
            const double len = 60.0;
            // Angles are measured y-up, so the screen-space y component is negated.
            draw_line(out, tx, ty, px(tx + len * std::cos(rad)), px(ty - len * std::sin(rad)),
                      kRay);
        }
    }

    if (result.face) draw_rect(out, *result.face, kFace);
    return out;
}

}  // namespace pv
