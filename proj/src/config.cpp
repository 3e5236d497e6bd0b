#include "pointvec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pointvec/error.hpp"

namespace pv {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + value);
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for '" + key + "': " + value);
    }
}

void require(bool ok, const std::string& key, const char* what) {
    if (!ok) throw ConfigError("value out of range for '" + key + "': " + what);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    bool secondary_lo_set = false;
    bool secondary_hi_set = false;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key in line: " + line);
        if (value.empty()) throw ConfigError("missing value for '" + key + "'");

        if (key == "variant") {
            if (value == "codebook") {
                cfg.variant = BgVariant::codebook;
            } else if (value == "kalman") {
                cfg.variant = BgVariant::kalman;
            } else {
                throw ConfigError("variant must be codebook or kalman, got: " + value);
            }
        } else if (key == "calibration") {
            cfg.calibration = static_cast<int>(parse_int(key, value));
            require(cfg.calibration >= 1, key, "must be >= 1");
        } else if (key == "epsilon_color") {
            cfg.codebook.epsilon_color = parse_double(key, value);
            require(cfg.codebook.epsilon_color >= 0.0, key, "must be >= 0");
        } else if (key == "alpha_b") {
            cfg.codebook.alpha_b = parse_double(key, value);
            require(cfg.codebook.alpha_b > 0.0 && cfg.codebook.alpha_b < 1.0, key,
                    "must be in (0,1)");
        } else if (key == "beta_b") {
            cfg.codebook.beta_b = parse_double(key, value);
            require(cfg.codebook.beta_b >= 1.0, key, "must be >= 1");
        } else if (key == "rate_slow") {
            cfg.kalman.rate_slow = parse_double(key, value);
        } else if (key == "rate_fast") {
            cfg.kalman.rate_fast = parse_double(key, value);
        } else if (key == "fg_threshold") {
            cfg.kalman.fg_threshold = parse_double(key, value);
            require(cfg.kalman.fg_threshold > 0.0, key, "must be > 0");
        } else if (key == "changed_pixel_fraction") {
            cfg.light.changed_pixel_fraction = parse_double(key, value);
            require(cfg.light.changed_pixel_fraction > 0.0 && cfg.light.changed_pixel_fraction <= 1.0,
                    key, "must be in (0,1]");
        } else if (key == "change_detect_floor") {
            cfg.light.change_detect_floor = parse_double(key, value);
            require(cfg.light.change_detect_floor >= 0.0, key, "must be >= 0");
        } else if (key == "alpha_soft_max") {
            cfg.light.alpha_soft_max = parse_double(key, value);
            require(cfg.light.alpha_soft_max > 0.0, key, "must be > 0");
        } else if (key == "purge_fraction") {
            cfg.light.purge_fraction = parse_double(key, value);
            require(cfg.light.purge_fraction > 0.0 && cfg.light.purge_fraction <= 1.0, key,
                    "must be in (0,1]");
        } else if (key == "h_bins") {
            cfg.skin.h_bins = static_cast<int>(parse_int(key, value));
            require(cfg.skin.h_bins >= 1, key, "must be >= 1");
        } else if (key == "s_bins") {
            cfg.skin.s_bins = static_cast<int>(parse_int(key, value));
            require(cfg.skin.s_bins >= 1, key, "must be >= 1");
        } else if (key == "theta") {
            cfg.skin.theta = parse_double(key, value);
            require(cfg.skin.theta >= 0.0 && cfg.skin.theta <= 1.0, key, "must be in [0,1]");
        } else if (key == "histogram_mode") {
            if (value == "hs") {
                cfg.skin.histogram_mode = HistogramMode::hs;
            } else if (value == "normalized_rgb") {
                cfg.skin.histogram_mode = HistogramMode::normalized_rgb;
            } else {
                throw ConfigError("histogram_mode must be hs or normalized_rgb, got: " + value);
            }
        } else if (key == "nonskin_mode") {
            if (value == "uniform") {
                cfg.skin.nonskin_mode = NonskinMode::uniform;
            } else if (value == "foreground") {
                cfg.skin.nonskin_mode = NonskinMode::foreground;
            } else {
                throw ConfigError("nonskin_mode must be uniform or foreground, got: " + value);
            }
        } else if (key == "skin_calibration") {
            cfg.skin.skin_calibration = static_cast<int>(parse_int(key, value));
            require(cfg.skin.skin_calibration >= 1, key, "must be >= 1");
        } else if (key == "k") {
            cfg.pointing.k = static_cast<int>(parse_int(key, value));
            require(cfg.pointing.k >= 1, key, "must be >= 1");
        } else if (key == "theta_t") {
            cfg.pointing.theta_t = parse_double(key, value);
            require(cfg.pointing.theta_t > 0.0 && cfg.pointing.theta_t < 180.0, key,
                    "must be in (0,180)");
        } else if (key == "dominant_frac") {
            cfg.pointing.dominant_frac = parse_double(key, value);
            require(cfg.pointing.dominant_frac > 0.0 && cfg.pointing.dominant_frac < 1.0, key,
                    "must be in (0,1)");
        } else if (key == "dominant_basis") {
            if (value == "perimeter") {
                cfg.pointing.dominant_basis = DominantBasis::perimeter;
            } else if (value == "point_count") {
                cfg.pointing.dominant_basis = DominantBasis::point_count;
            } else {
                throw ConfigError("dominant_basis must be perimeter or point_count, got: " + value);
            }
        } else if (key == "cd_margin") {
            cfg.pointing.cd_margin = parse_double(key, value);
            require(cfg.pointing.cd_margin >= 0.0, key, "must be >= 0");
        } else if (key == "min_defect_depth") {
            cfg.pointing.min_defect_depth = parse_double(key, value);
            require(cfg.pointing.min_defect_depth >= 0.0, key, "must be >= 0");
        } else if (key == "index_band_lo") {
            cfg.pointing.index_band_lo = parse_double(key, value);
        } else if (key == "index_band_hi") {
            cfg.pointing.index_band_hi = parse_double(key, value);
        } else if (key == "index_band_mode") {
            if (value == "off") {
                cfg.pointing.index_band_mode = IndexBandMode::off;
            } else if (value == "curvature") {
                cfg.pointing.index_band_mode = IndexBandMode::curvature;
            } else if (value == "valley") {
                cfg.pointing.index_band_mode = IndexBandMode::valley;
            } else {
                throw ConfigError("index_band_mode must be off, curvature, or valley, got: " + value);
            }
        } else if (key == "secondary_band_lo") {
            cfg.pointing.secondary_band_lo = parse_double(key, value);
            secondary_lo_set = true;
        } else if (key == "secondary_band_hi") {
            cfg.pointing.secondary_band_hi = parse_double(key, value);
            secondary_hi_set = true;
        } else if (key == "min_blob_area") {
            cfg.pointing.min_blob_area = parse_int(key, value);
            require(cfg.pointing.min_blob_area >= 1, key, "must be >= 1");
        } else if (key == "resample_points") {
            cfg.pointing.resample_points = static_cast<int>(parse_int(key, value));
            require(cfg.pointing.resample_points >= 8, key, "must be >= 8");
        } else if (key == "fingertip_rule") {
            if (value == "corner") {
                cfg.pointing.fingertip_rule = FingertipRule::corner;
            } else if (value == "ep") {
                cfg.pointing.fingertip_rule = FingertipRule::ep;
            } else if (value == "both") {
                cfg.pointing.fingertip_rule = FingertipRule::both;
            } else {
                throw ConfigError("fingertip_rule must be corner, ep, or both, got: " + value);
            }
        } else if (key == "preferred_hand") {
            if (value == "left") {
                cfg.preferred_hand = PreferredHand::left;
            } else if (value == "right") {
                cfg.preferred_hand = PreferredHand::right;
            } else {
                throw ConfigError("preferred_hand must be left or right, got: " + value);
            }
        } else {
            throw ConfigError("unknown configuration key: " + key);
        }
    }

    if (secondary_lo_set != secondary_hi_set) {
        throw ConfigError("secondary_band_lo and secondary_band_hi must be set together");
    }
    cfg.pointing.secondary_band_enabled = secondary_lo_set && secondary_hi_set;

    require(cfg.kalman.rate_slow > 0.0 && cfg.kalman.rate_slow < 1.0, "rate_slow",
            "must be in (0,1)");
    require(cfg.kalman.rate_fast > 0.0 && cfg.kalman.rate_fast < 1.0, "rate_fast",
            "must be in (0,1)");
    require(cfg.kalman.rate_fast > cfg.kalman.rate_slow, "rate_fast",
            "must exceed rate_slow");
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

const char* name_of(BgVariant v) { return v == BgVariant::codebook ? "codebook" : "kalman"; }
const char* name_of(HistogramMode m) { return m == HistogramMode::hs ? "hs" : "normalized_rgb"; }
const char* name_of(NonskinMode m) { return m == NonskinMode::uniform ? "uniform" : "foreground"; }
const char* name_of(DominantBasis b) {
    return b == DominantBasis::perimeter ? "perimeter" : "point_count";
}
const char* name_of(IndexBandMode m) {
    switch (m) {
        case IndexBandMode::off: return "off";
        case IndexBandMode::curvature: return "curvature";
        case IndexBandMode::valley: return "valley";
    }
    return "off";
}
const char* name_of(FingertipRule r) {
    switch (r) {
        case FingertipRule::corner: return "corner";
        case FingertipRule::ep: return "ep";
        case FingertipRule::both: return "both";
    }
    return "both";
}
const char* name_of(PreferredHand h) { return h == PreferredHand::left ? "left" : "right"; }

}  // namespace

std::string config_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "variant = " << name_of(cfg.variant) << '\n'
        << "calibration = " << cfg.calibration << '\n'
        << "epsilon_color = " << cfg.codebook.epsilon_color << '\n'
        << "alpha_b = " << cfg.codebook.alpha_b << '\n'
        << "beta_b = " << cfg.codebook.beta_b << '\n'
        << "rate_slow = " << cfg.kalman.rate_slow << '\n'
        << "rate_fast = " << cfg.kalman.rate_fast << '\n'
        << "fg_threshold = " << cfg.kalman.fg_threshold << '\n'
        << "changed_pixel_fraction = " << cfg.light.changed_pixel_fraction << '\n'
        << "change_detect_floor = " << cfg.light.change_detect_floor << '\n'
        << "alpha_soft_max = " << cfg.light.alpha_soft_max << '\n'
        << "purge_fraction = " << cfg.light.purge_fraction << '\n'
        << "h_bins = " << cfg.skin.h_bins << '\n'
        << "s_bins = " << cfg.skin.s_bins << '\n'
        << "theta = " << cfg.skin.theta << '\n'
        << "histogram_mode = " << name_of(cfg.skin.histogram_mode) << '\n'
        << "nonskin_mode = " << name_of(cfg.skin.nonskin_mode) << '\n'
        << "skin_calibration = " << cfg.skin.skin_calibration << '\n'
        << "k = " << cfg.pointing.k << '\n'
        << "theta_t = " << cfg.pointing.theta_t << '\n'
        << "dominant_frac = " << cfg.pointing.dominant_frac << '\n'
        << "dominant_basis = " << name_of(cfg.pointing.dominant_basis) << '\n'
        << "cd_margin = " << cfg.pointing.cd_margin << '\n'
        << "min_defect_depth = " << cfg.pointing.min_defect_depth << '\n'
        << "index_band_lo = " << cfg.pointing.index_band_lo << '\n'
        << "index_band_hi = " << cfg.pointing.index_band_hi << '\n'
        << "index_band_mode = " << name_of(cfg.pointing.index_band_mode) << '\n'
        << "min_blob_area = " << cfg.pointing.min_blob_area << '\n'
        << "resample_points = " << cfg.pointing.resample_points << '\n'
        << "fingertip_rule = " << name_of(cfg.pointing.fingertip_rule) << '\n'
        << "preferred_hand = " << name_of(cfg.preferred_hand) << '\n';
    if (cfg.pointing.secondary_band_enabled) {
        out << "secondary_band_lo = " << cfg.pointing.secondary_band_lo << '\n'
            << "secondary_band_hi = " << cfg.pointing.secondary_band_hi << '\n';
    }
    return out.str();
}

}  // namespace pv
