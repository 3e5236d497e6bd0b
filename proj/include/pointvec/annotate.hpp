#pragma once

#include "pointvec/image.hpp"
#include "pointvec/pipeline.hpp"

namespace pv {

// Returns a copy of the frame with the analysis overlay drawn on top: hand contour,
// convex hull, defect markers, fingertip, pointing ray, and the face rectangle.
Frame annotate(const Frame& src, const FrameResult& result);

}  // namespace pv
