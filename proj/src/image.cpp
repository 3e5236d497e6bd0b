#include "pointvec/image.hpp"

#include <algorithm>
#include <cmath>

namespace pv {

Frame::Frame(int w, int h)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {
    if (w < 1 || h < 1) throw InvalidArgument("frame dimensions must be at least 1x1");
}

GrayFrame::GrayFrame(int w, int h)
    : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {
    if (w < 1 || h < 1) throw InvalidArgument("gray frame dimensions must be at least 1x1");
}

BinaryMask::BinaryMask(int w, int h)
    : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {
    if (w < 1 || h < 1) throw InvalidArgument("mask dimensions must be at least 1x1");
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b != 0;
    return n;
}

Hsv rgb_to_hsv(Rgb p) {
    const double r = p.r / 255.0;
    const double g = p.g / 255.0;
    const double b = p.b / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    Hsv out;
    out.v = mx;
    out.s = mx > 0.0 ? delta / mx : 0.0;
    if (delta > 0.0) {
        double h;
        if (mx == r) {
            h = (g - b) / delta;
        } else if (mx == g) {
            h = 2.0 + (b - r) / delta;
        } else {
            h = 4.0 + (r - g) / delta;
        }
        h *= 60.0;
        if (h < 0.0) h += 360.0;
        if (h >= 360.0) h -= 360.0;
        out.h = h;
    }
    return out;
}

Rgb hsv_to_rgb(const Hsv& p) {
    const double c = p.v * p.s;
    const double hp = p.h / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else             { r = c; b = x; }
    const double m = p.v - c;
    auto to8 = [](double v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    };
    return {to8(r + m), to8(g + m), to8(b + m)};
}

NormRgb rgb_to_normalized_rgb(Rgb p) {
    const double sum = static_cast<double>(p.r) + p.g + p.b;
    if (sum == 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return {p.r / sum, p.g / sum, p.b / sum};
}

GrayFrame to_gray(const Frame& f, GrayMode mode) {
    GrayFrame out(f.width, f.height);
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t o = i * 3;
        const double sum = static_cast<double>(f.pixels[o]) + f.pixels[o + 1] + f.pixels[o + 2];
        out.values[i] = mode == GrayMode::sum ? sum : sum / 3.0;
    }
    return out;
}

}  // namespace pv
