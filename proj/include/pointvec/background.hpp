#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pointvec/image.hpp"
#include "pointvec/types.hpp"

namespace pv {

// ---- Recursive (Kalman-style) per-pixel filter ------------------------------

struct KalmanParams {
    // State is (b, b_dot): background intensity and its per-frame drift.
    double a[2][2] = {{1.0, 0.7}, {0.0, 0.7}};  // state dynamics
    double h[2] = {1.0, 0.0};                   // measurement row: observe b
    double rate_slow = 0.1;   // gain while the pixel reads as foreground
    double rate_fast = 0.5;   // gain while the pixel reads as background
    double fg_threshold = 25.0;
};

struct KalmanPixelState {
    double b = 0.0;
    double b_dot = 0.0;
};

// One step of s' = A*s + K*(I - H*A*s), with K = (rate_slow, rate_slow) when
// the pixel was foreground on the previous frame and (rate_fast, rate_fast)
// otherwise.
KalmanPixelState kalman_update(const KalmanPixelState& s, double intensity,
                               bool was_foreground, const KalmanParams& p);

// Predicted background H*A*s used for the current frame's classification.
double kalman_predicted(const KalmanPixelState& s, const KalmanParams& p);

// ---- Codebook model ---------------------------------------------------------

struct Codeword {
    double v[3] = {0.0, 0.0, 0.0};  // mean color
    double i_min = 0.0;             // brightness bounds, sum-intensity units
    double i_max = 0.0;
    std::int64_t freq = 0;
    std::int64_t mnrl = 0;          // longest run of frames without a match
    std::int64_t first_seen = 0;
    std::int64_t last_seen = 0;
};

struct CodebookParams {
    double epsilon_color = 20.0;  // color distortion threshold, 0-255 scale
    double alpha_b = 0.5;         // lower brightness-bound factor
    double beta_b = 1.25;         // upper brightness-bound factor
};

struct LightChangePolicy {
    double changed_pixel_fraction = 0.80;
    double change_detect_floor = 3.0;  // mean-gray units; changes above count
    double alpha_soft_max = 10.0;      // below: absorb in place; above: purge first
    double purge_fraction = 0.90;
};

enum class LightAction { none, soft, purge };

// Perpendicular chromatic distortion of x from the origin line through v.
double colordist(const double x[3], const double v[3]);

struct CodebookModel {
    int width = 0;
    int height = 0;
    CodebookParams params;
    std::vector<std::vector<Codeword>> cells;  // one codeword list per pixel
    std::int64_t trained_frames = 0;
    std::int64_t time = 0;        // 1-based frame clock across train + run
    BinaryMask last_mask;         // most recent classification, empty before any

    CodebookModel() = default;
    CodebookModel(int w, int h, const CodebookParams& p);
};

// Returns the matched codeword index, or -1 when the pixel is foreground.
// The first codeword satisfying both the color and brightness conditions wins.
int codebook_match(const CodebookModel& m, Rgb x, int px, int py);

void codebook_train_frame(CodebookModel& m, const Frame& f);

// Wrap-around recurrence accounting, then prune codewords whose longest
// unmatched run exceeds half the training length.
void codebook_finish_training(CodebookModel& m);

CodebookModel codebook_train(const std::vector<Frame>& frames, const CodebookParams& p,
                             int width, int height);

// Detects a scene-wide illumination change between two mean-gray frames and
// maintains the model: small shifts are absorbed in place, large ones purge
// the oldest codewords first and then absorb. Pixels set in `exclude` (when
// given) are never absorbed. Returns the action taken.
LightAction light_change_update(CodebookModel& m, const GrayFrame& prev, const GrayFrame& cur,
                                const Frame& frame, const LightChangePolicy& policy,
                                const BinaryMask* exclude);

// ---- Variant dispatch -------------------------------------------------------

enum class BgVariant { codebook, kalman };

struct BackgroundModel {
    BgVariant variant = BgVariant::codebook;
    int width = 0;
    int height = 0;

    CodebookModel codebook;

    KalmanParams kalman_params;
    std::vector<KalmanPixelState> kalman_states;
    std::vector<std::uint8_t> kalman_prev_fg;
    bool kalman_initialized = false;

    BackgroundModel() = default;
    BackgroundModel(BgVariant v, int w, int h, const CodebookParams& cp, const KalmanParams& kp);
};

// Absorbs one frame into the model without classifying (calibration phase).
void train_frame(BackgroundModel& m, const Frame& f);

// Ends calibration: prunes transient codewords and seeds the classification
// state from the final calibration frame.
void finish_training(BackgroundModel& m, const Frame& last_calibration_frame);

// Classifies every pixel and updates model state for the active variant.
BinaryMask subtract_frame(BackgroundModel& m, const Frame& f);

// Versioned binary container ("PVBG"); field order documented in the README.
void save_model(const BackgroundModel& m, std::ostream& out);
BackgroundModel load_model(std::istream& in);

}  // namespace pv
