#pragma once

#include <vector>

#include "pointvec/types.hpp"

namespace pv {

// Convex hull vertices as strictly increasing positions into the source
// point sequence. When the input is a closed boundary in canonical order,
// walking the indices in increasing order traverses the hull polygon
// counterclockwise (y-up convention). Interior and edge-collinear points
// are excluded.
struct Hull {
    std::vector<int> indices;
};

// For one hull edge (start_idx, end_idx): the contour point between the two
// endpoints that lies farthest from the edge line.
struct Defect {
    int start_idx = 0;
    int end_idx = 0;
    int far_idx = 0;
    double depth = 0.0;
};

Hull convex_hull(const std::vector<PointD>& points);

// Distance from point c to the infinite line through a and b; a must differ from b.
double point_line_distance(const PointD& c, const PointD& a, const PointD& b);

// One defect per consecutive hull vertex pair that has a contour point
// strictly between the endpoints; ties broken toward the lowest contour
// index; zero-depth entries are omitted.
std::vector<Defect> convexity_defects(const std::vector<PointD>& points, const Hull& h);

// Angle in degrees [0,180] at points[i] formed with points[i-k] and
// points[i+k] (cyclic). Coincident points make the angle 180 (flat).
double k_curvature_angle(const std::vector<PointD>& points, int i, int k);

}  // namespace pv
