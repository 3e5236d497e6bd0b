#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pointvec/contour.hpp"
#include "pointvec/geometry.hpp"
#include "pointvec/types.hpp"

namespace pv {

enum class Gesture { no_hand, not_pointing, pointing };
const char* to_string(Gesture g);

enum class OrientMethod { cog, next_defect, bisector };

// What "1/6 of the contour length" is measured against in the dominance test.
enum class DominantBasis { perimeter, point_count };

// How the index-finger angle band is checked. `curvature` applies it to the
// fingertip's k-curvature angle; `valley` to the angle the adjacent defect
// far points span at the fingertip. Both regimes reject every shape the
// corner threshold accepts, so the band ships off by default.
enum class IndexBandMode { off, curvature, valley };

// Which fingertip route must succeed for a pointing classification.
enum class FingertipRule { corner, ep, both };

struct PointingParams {
    int k = 16;                    // curvature probe offset on the resampled contour
    double theta_t = 30.0;         // corner angle threshold, degrees
    double dominant_frac = 1.0 / 6.0;
    DominantBasis dominant_basis = DominantBasis::perimeter;
    double cd_margin = 0.25;       // EP survivors need dist > (1+margin)*CDAvg
    double min_defect_depth = 1.0;  // px; shallower defects are rasterization noise
    double index_band_lo = 80.0;
    double index_band_hi = 130.0;
    IndexBandMode index_band_mode = IndexBandMode::off;
    bool secondary_band_enabled = false;
    double secondary_band_lo = 190.0;  // as stated; lo > hi admits nothing
    double secondary_band_hi = 170.0;
    std::int64_t min_blob_area = 200;  // at 640x480; scaled with frame area
    int resample_points = 128;
    FingertipRule fingertip_rule = FingertipRule::both;
};

// min_blob_area rescaled to the actual frame area (round, floor 1).
std::int64_t scaled_min_area(const PointingParams& p, int frame_w, int frame_h);

struct BodyAssignment {
    std::optional<Blob> head;
    std::optional<Blob> left_hand;
    std::optional<Blob> right_hand;
};

struct FingertipCandidate {
    int contour_index = 0;   // position in the resampled sequence
    PointD point;
    double angle_deg = 0.0;  // k-curvature at the index
    double dist_to_cog = 0.0;
};

struct PointingDiagnostics {
    std::vector<PointD> resampled;
    std::vector<int> hull_indices;
    std::vector<Defect> defects;             // indices into `resampled`
    Cog cog;
    double perimeter = 0.0;
    double cd_avg = -1.0;                    // -1 when there are no defects
    std::vector<FingertipCandidate> corner_candidates;
    std::optional<FingertipCandidate> corner_winner;
    std::vector<int> ep_survivors;           // resampled indices, one per cluster
    std::vector<std::string> notes;
};

struct PointingDecision {
    Gesture gesture = Gesture::no_hand;
    std::optional<PointD> fingertip;
    std::optional<double> angle_cog;          // degrees [0,360), y-up convention
    std::optional<double> angle_next_defect;
    std::optional<double> angle_bisector;
    PointingDiagnostics diag;
};

// Direction of (dx, dy_image) in degrees [0,360), counterclockwise from +x
// with y up — image rows grow downward, so dy is negated.
double direction_deg(double dx, double dy_image);

// Largest blob becomes the head; the next two (or one) become hands, told
// apart by centroid x — for a single hand, by which side of the head it is on.
BodyAssignment select_body_blobs(const std::vector<Blob>& area_sorted, std::int64_t min_area);

// Indices whose k-curvature angle is under theta_t and whose point lies
// farther from the centroid than the chord midpoint (convex protrusions).
std::vector<FingertipCandidate> corner_candidates(const std::vector<PointD>& resampled,
                                                  const Cog& cog, const PointingParams& p);

// The farthest candidate wins if it beats the best rival at least k indices
// away by more than dominant_frac of the contour length; a lone candidate
// (or one with no far-enough rival) wins outright.
std::optional<FingertipCandidate> dominant_fingertip(const std::vector<FingertipCandidate>& cands,
                                                     double perimeter, int n_points,
                                                     const PointingParams& p);

// Hull vertices flanking convexity defects (the EP set), kept when farther
// from the centroid than (1+cd_margin) times the mean centroid distance of
// all defect points (starts, ends, and floors averaged together); survivors
// within k cyclic indices merge, keeping the farthest.
std::vector<int> hull_defect_fingertips(const std::vector<PointD>& resampled, const Hull& h,
                                        const std::vector<Defect>& defects, const Cog& cog,
                                        const PointingParams& p);

// Full per-hand chain: trace, resample, both fingertip routes, gesture
// decision, and all three orientation angles.
PointingDecision classify_pointing(const Blob& hand, const PointingParams& p, int frame_w,
                                   int frame_h);

// Pointing direction for one method; empty only when the fallback itself is
// impossible. Methods needing defects fall back to the centroid method and
// note it in `notes`.
std::optional<double> orientation(const std::vector<PointD>& resampled, const PointD& tip,
                                  int tip_index, const std::vector<Defect>& defects,
                                  const Cog& cog, OrientMethod method,
                                  std::vector<std::string>* notes);

}  // namespace pv
