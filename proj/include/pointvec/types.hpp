#pragma once

#include <cstdint>
#include <vector>

namespace pv {

struct PointI {
    int x = 0;
    int y = 0;
};

inline bool operator==(const PointI& a, const PointI& b) { return a.x == b.x && a.y == b.y; }

struct PointD {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned rectangle, top-left corner plus size, in pixel units.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool contains(int px, int py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
};

inline bool operator==(const Rect& a, const Rect& b) {
    return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
}

// One 8-connected region of set mask bits.
struct Blob {
    int label = 0;
    std::vector<PointI> pixels;
    std::int64_t area = 0;  // == pixels.size()
    Rect bbox;
};

}  // namespace pv
