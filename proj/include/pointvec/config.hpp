#pragma once

#include <string>

#include "pointvec/background.hpp"
#include "pointvec/pointing.hpp"
#include "pointvec/skin.hpp"

namespace pv {

enum class PreferredHand { left, right };

// Everything the pipeline needs, with working defaults for every field.
struct PipelineConfig {
    BgVariant variant = BgVariant::codebook;
    int calibration = 30;  // frames that train the background model

    CodebookParams codebook;
    KalmanParams kalman;
    LightChangePolicy light;
    SkinParams skin;
    PointingParams pointing;

    PreferredHand preferred_hand = PreferredHand::right;
};

// Flat key=value text; '#' starts a comment, blank lines are skipped.
// Unknown keys, unparsable values, and out-of-range values are all errors.
PipelineConfig parse_config(const std::string& text);

// Reads the file and parses it. A missing or unreadable file is an I/O error.
PipelineConfig load_config(const std::string& path);

// The configuration rendered back as key=value lines (every key, current
// values) — handy as a starting template.
std::string config_text(const PipelineConfig& cfg);

}  // namespace pv
