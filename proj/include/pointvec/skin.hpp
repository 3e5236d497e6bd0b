#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pointvec/image.hpp"
#include "pointvec/types.hpp"

namespace pv {

enum class HistogramMode { hs, normalized_rgb };
enum class NonskinMode { uniform, foreground };

struct SkinParams {
    int h_bins = 30;
    int s_bins = 32;
    double theta = 0.25;  // posterior threshold, probability units
    HistogramMode histogram_mode = HistogramMode::hs;
    NonskinMode nonskin_mode = NonskinMode::uniform;
    int skin_calibration = 30;  // frames the foreground non-skin table accumulates over
};

// 2D bin-count table over (hue, saturation) — or the normalized-RGB plane in
// the alternate mode. Row-major: counts[h_index * s_bins + s_index].
struct SkinHistogram {
    int h_bins = 0;
    int s_bins = 0;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    SkinHistogram() = default;
    SkinHistogram(int hb, int sb);

    std::int64_t at(int hb, int sb) const {
        return counts[static_cast<std::size_t>(hb) * s_bins + sb];
    }
    std::int64_t& at(int hb, int sb) {
        return counts[static_cast<std::size_t>(hb) * s_bins + sb];
    }
};

struct BinIndex {
    int h = 0;
    int s = 0;
};

// Maps one pixel color to its histogram bin under the configured mode.
BinIndex color_bin(Rgb px, const SkinParams& p);

// Forehead sub-rectangle of a face rectangle: top-left shifted by
// (width/3, height/10), size (width/3, height/5), integer division.
// The face must be at least 3 wide and 10 tall so the result is nonempty.
Rect forehead_from_face(const Rect& face);

// All-ones table; stands in for the non-skin histogram until (or unless) a
// measured one exists.
SkinHistogram uniform_histogram(const SkinParams& p);

// Adds every ROI pixel (restricted to set mask bits when a mask is given)
// to the table. Returns how many pixels were counted.
std::int64_t add_histogram_samples(SkinHistogram& h, const Frame& f, const Rect& roi,
                                   const BinaryMask* mask, const SkinParams& p);

// Fresh histogram over one ROI; zero counted pixels is an error.
SkinHistogram build_histogram(const Frame& f, const Rect& roi, const BinaryMask* mask,
                              const SkinParams& p);

// P(skin | color bin) from the skin and non-skin tables with priors
// proportional to the table totals. Both-zero bins map to 0.
double skin_posterior(const SkinHistogram& hs, const SkinHistogram& hn, int hbin, int sbin);

// Per-pixel posterior over foreground pixels; background pixels get 0.
GrayFrame backproject(const Frame& f, const BinaryMask& fg, const SkinHistogram& hs,
                      const SkinHistogram& hn, const SkinParams& p);

// Bit set iff probability > theta (strict).
BinaryMask binarize(const GrayFrame& prob, double theta);

// 8-connected labeling; blobs sorted by area descending (ties keep scan
// order); labels are 1-based in first-encounter scan order.
std::vector<Blob> connected_components(const BinaryMask& m);

// Plain-text export: "h_bins s_bins total" header, then one line of counts
// per h row.
std::string histogram_text(const SkinHistogram& h);

}  // namespace pv
