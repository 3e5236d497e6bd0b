#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pointvec/types.hpp"

namespace pv {

// Closed boundary of a blob. Points run counterclockwise in a y-up frame
// (clockwise as drawn on screen, where y grows downward). chain[i] is the
// 8-direction step code from points[i] to points[i+1] (cyclic):
//   0=E 1=NE 2=N 3=NW 4=W 5=SW 6=S 7=SE, with N meaning up on screen.
struct Contour {
    std::vector<PointI> points;
    std::vector<std::uint8_t> chain;  // same length as points; empty for single-pixel blobs
    double perimeter = 0.0;           // sum of step lengths, diagonals count sqrt(2)
};

struct Moments {
    double m00 = 0.0;
    double m10 = 0.0;
    double m01 = 0.0;
};

struct Cog {
    double x = 0.0;
    double y = 0.0;
};

// Moore boundary following from the topmost, then leftmost pixel.
// A single-pixel blob yields a one-point contour with an empty chain.
Contour trace_contour(const Blob& b);

// Shoelace polygon area over the closed point sequence; needs >= 3 points.
double area(const Contour& c);

// Raw moments and centroid over the blob's pixel set.
std::pair<Moments, Cog> moments_cog(const Blob& b);

// n points equally spaced by arc length along the closed polyline, starting
// at the first input point. Coordinates are real-valued.
std::vector<PointD> resample(const std::vector<PointD>& closed_points, int n);
std::vector<PointD> resample(const Contour& c, int n);

double polyline_perimeter(const std::vector<PointD>& closed_points);

// Debug dump, one "x y chain_code" line per point.
std::string contour_dump(const Contour& c);

}  // namespace pv
