#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pointvec/error.hpp"

namespace pv {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

inline bool operator==(const Rgb& a, const Rgb& b) {
    return a.r == b.r && a.g == b.g && a.b == b.b;
}

// Hue in degrees [0,360), saturation and value in [0,1]. Hue is 0 when saturation is 0.
struct Hsv {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
};

// Chromaticity coordinates; components always sum to 1. Black maps to (1/3, 1/3, 1/3).
struct NormRgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // interleaved RGB, row-major

    Frame() = default;
    Frame(int w, int h);

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
    Rgb at(int x, int y) const {
        const std::size_t o = offset(x, y);
        return {pixels[o], pixels[o + 1], pixels[o + 2]};
    }
    void set(int x, int y, Rgb c) {
        const std::size_t o = offset(x, y);
        pixels[o] = c.r;
        pixels[o + 1] = c.g;
        pixels[o + 2] = c.b;
    }
};

inline bool operator==(const Frame& a, const Frame& b) {
    return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
}

struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    GrayFrame() = default;
    GrayFrame(int w, int h);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, double v) { values[static_cast<std::size_t>(y) * width + x] = v; }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1, row-major

    BinaryMask() = default;
    BinaryMask(int w, int h);

    bool empty() const { return width == 0 || height == 0; }
    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;
};

enum class GrayMode { sum, mean };

Hsv rgb_to_hsv(Rgb p);
Rgb hsv_to_rgb(const Hsv& p);
NormRgb rgb_to_normalized_rgb(Rgb p);
GrayFrame to_gray(const Frame& f, GrayMode mode);

}  // namespace pv
