#include "pointvec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pointvec/error.hpp"

namespace pv {

namespace {

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

double seg_dist(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 == 0.0 ? 0.0 : ((px - ax) * dx + (py - ay) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

struct Capsule {
    double ax, ay, bx, by, radius;
};

}  // namespace

Frame synth_background(std::uint64_t bg_seed, int width, int height, int brightness) {
    Frame f(width, height);
    SplitMix64 rng(bg_seed);

    // Muted furniture — hues far from skin so only the person back-projects.
    static const Rgb kPalette[6] = {{60, 80, 120}, {70, 110, 90},   {90, 90, 110},
                                    {50, 70, 100}, {100, 120, 140}, {80, 100, 80}};
    struct Patch {
        Rect r;
        Rgb c;
    };
    std::vector<Patch> patches;
    for (int i = 0; i < 6; ++i) {
        const int rw = std::max(1, rng.next_int(width / 10, std::max(width / 10, width / 4)));
        const int rh = std::max(1, rng.next_int(height / 10, std::max(height / 10, height / 3)));
        const int rx = rng.next_int(0, std::max(0, width - rw));
        const int ry = rng.next_int(0, std::max(0, height - rh));
        const int dv = rng.next_int(-10, 10);  // common shift keeps the hue put
        const Rgb base = kPalette[i];
        patches.push_back({{rx, ry, rw, rh},
                           {clamp8(base.r + dv), clamp8(base.g + dv), clamp8(base.b + dv)}});
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int g = 70 + (60 * x) / width + (20 * y) / height;
            Rgb c{clamp8(g), clamp8(g), clamp8(g)};
            for (const Patch& p : patches) {
                if (p.r.contains(x, y)) c = p.c;
            }
            const int sp = rng.next_int(-6, 6) + brightness;
            f.set(x, y, {clamp8(c.r + sp), clamp8(c.g + sp), clamp8(c.b + sp)});
        }
    }
    return f;
}

SyntheticScene synth_scene(const SceneSpec& spec) {
    if (spec.width < 320 || spec.height < 240) {
        throw InvalidArgument("synthetic scenes need at least a 320x240 frame");
    }
    if (spec.angle_deg < 0.0 || spec.angle_deg >= 360.0) {
        throw InvalidArgument("pointing angle must lie in [0,360)");
    }

    SyntheticScene out;
    out.frame = synth_background(spec.bg_seed, spec.width, spec.height, spec.brightness);
    Frame& f = out.frame;
    const int w = spec.width;
    const int h = spec.height;
    SplitMix64 rng(spec.seed);

    const double s = 0.8 + 0.5 * rng.next_double();  // body scale
    const int fx = (30 * w) / 100 + rng.next_int(-(47 * w) / 1000, (47 * w) / 1000);
    const int fy = (29 * h) / 100 + rng.next_int(-(42 * h) / 1000, (42 * h) / 1000);
    const int hx = (6875 * w) / 10000 + rng.next_int(-(47 * w) / 1000, (47 * w) / 1000);
    const int hy = (625 * h) / 1000 + rng.next_int(-(83 * h) / 1000, (83 * h) / 1000);

    const Rgb face_tone{208, 152, 120};
    const Rgb skin_tone{216, 160, 128};  // forehead band and hand share this
    const Rgb sleeve_tone{58, 62, 88};
    const int bright = spec.brightness;

    const auto paint = [&](int x, int y, Rgb base, int common_amp, bool per_channel) {
        const int j = common_amp > 0 ? rng.next_int(-common_amp, common_amp) : 0;
        const int jr = per_channel ? rng.next_int(-1, 1) : 0;
        const int jg = per_channel ? rng.next_int(-1, 1) : 0;
        const int jb = per_channel ? rng.next_int(-1, 1) : 0;
        f.set(x, y, {clamp8(base.r + j + jr + bright), clamp8(base.g + j + jg + bright),
                     clamp8(base.b + j + jb + bright)});
    };

    // Sleeved arm under the hand, running toward the lower right corner.
    {
        const double radius = 9.0 * s;
        const double ex = hx + w / 2.0;
        const double ey = hy + h / 3.0;
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min<double>(hx, ex) - radius)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max<double>(hx, ex) + radius)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min<double>(hy, ey) - radius)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max<double>(hy, ey) + radius)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (seg_dist(x, y, hx, hy, ex, ey) <= radius) paint(x, y, sleeve_tone, 2, false);
            }
        }
    }

    // Face ellipse with the brighter forehead band.
    const int ax = static_cast<int>(std::lround(42.0 * s));
    const int ay = static_cast<int>(std::lround(52.0 * s));
    const Rect face{fx - ax, fy - ay, 2 * ax + 1, 2 * ay + 1};
    const int band_y0 = face.y + face.h / 10;
    const int band_y1 = band_y0 + face.h / 5;  // exclusive
    for (int y = face.y; y < face.y + face.h; ++y) {
        if (y < 0 || y >= h) continue;
        for (int x = face.x; x < face.x + face.w; ++x) {
            if (x < 0 || x >= w) continue;
            const double nx = static_cast<double>(x - fx) / ax;
            const double ny = static_cast<double>(y - fy) / ay;
            if (nx * nx + ny * ny > 1.0) continue;
            if (y >= band_y0 && y < band_y1) {
                paint(x, y, skin_tone, 6, true);
            } else {
                paint(x, y, face_tone, 3, false);
            }
        }
    }

    // Hand: fist disc plus zero, one, or five finger capsules.
    const double a_rad = spec.angle_deg * std::numbers::pi / 180.0;
    const double radius_fist = 26.0 * s;
    std::vector<Capsule> fingers;
    const auto add_finger = [&](double angle_deg, double length, double lateral, double cap_r) {
        const double ar = angle_deg * std::numbers::pi / 180.0;
        const double ux = std::cos(ar);
        const double uy = -std::sin(ar);  // image rows grow downward
        const double px = -std::sin(ar);
        const double py = -std::cos(ar);
        const double bx = hx + ux * (0.75 * radius_fist) + px * lateral;
        const double by = hy + uy * (0.75 * radius_fist) + py * lateral;
        fingers.push_back({bx, by, bx + ux * length, by + uy * length, cap_r});
    };
    if (spec.gesture == SceneGesture::pointing) {
        add_finger(spec.angle_deg, 58.0 * s, 12.0 * s, 5.5 * s);
    } else if (spec.gesture == SceneGesture::palm) {
        static const double kSpread[5] = {-55.0, -27.0, 0.0, 27.0, 55.0};
        static const double kLength[5] = {40.0, 52.0, 58.0, 52.0, 42.0};
        for (int i = 0; i < 5; ++i) {
            add_finger(spec.angle_deg + kSpread[i], kLength[i] * s, 0.0, 5.0 * s);
        }
    }

    const double reach = radius_fist + 78.0 * s;
    const int hx0 = std::max(0, static_cast<int>(std::floor(hx - reach)));
    const int hx1 = std::min(w - 1, static_cast<int>(std::ceil(hx + reach)));
    const int hy0 = std::max(0, static_cast<int>(std::floor(hy - reach)));
    const int hy1 = std::min(h - 1, static_cast<int>(std::ceil(hy + reach)));
    double best_score = -1e300;
    PointI best_px{hx, hy};
    for (int y = hy0; y <= hy1; ++y) {
        for (int x = hx0; x <= hx1; ++x) {
            bool inside = std::hypot(x - hx, y - hy) <= radius_fist;
            for (std::size_t i = 0; !inside && i < fingers.size(); ++i) {
                inside = seg_dist(x, y, fingers[i].ax, fingers[i].ay, fingers[i].bx,
                                  fingers[i].by) <= fingers[i].radius;
            }
            if (!inside) continue;
            paint(x, y, skin_tone, 6, true);
            const double score = std::cos(a_rad) * (x - hx) + std::sin(a_rad) * (hy - y);
            if (score > best_score) {
                best_score = score;
                best_px = {x, y};
            }
        }
    }

    out.truth.pointing = spec.gesture == SceneGesture::pointing;
    out.truth.angle_deg = spec.angle_deg;
    out.truth.fingertip = best_px;
    out.truth.face = face;
    return out;
}

Frame shift_brightness(const Frame& f, int delta) {
    Frame out = f;
    for (std::uint8_t& v : out.pixels) {
        v = clamp8(static_cast<int>(v) + delta);
    }
    return out;
}

}  // namespace pv
