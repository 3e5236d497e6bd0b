#include "pointvec/background.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <tuple>

#include "pointvec/error.hpp"

namespace pv {

// ---- Kalman variant ---------------------------------------------------------

double kalman_predicted(const KalmanPixelState& s, const KalmanParams& p) {
    const double pb = p.a[0][0] * s.b + p.a[0][1] * s.b_dot;
    const double pd = p.a[1][0] * s.b + p.a[1][1] * s.b_dot;
    return p.h[0] * pb + p.h[1] * pd;
}

KalmanPixelState kalman_update(const KalmanPixelState& s, double intensity,
                               bool was_foreground, const KalmanParams& p) {
    const double pb = p.a[0][0] * s.b + p.a[0][1] * s.b_dot;
    const double pd = p.a[1][0] * s.b + p.a[1][1] * s.b_dot;
    const double innovation = intensity - (p.h[0] * pb + p.h[1] * pd);
    const double gain = was_foreground ? p.rate_slow : p.rate_fast;
    return {pb + gain * innovation, pd + gain * innovation};
}

// ---- Codebook variant -------------------------------------------------------

double colordist(const double x[3], const double v[3]) {
    const double xx = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const double vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (vv == 0.0) return std::sqrt(xx);  // line through a black codeword degenerates
    const double xv = x[0] * v[0] + x[1] * v[1] + x[2] * v[2];
    const double proj = (xv * xv) / vv;
    return std::sqrt(std::max(0.0, xx - proj));
}

namespace {

bool brightness_ok(double intensity, const Codeword& cw, const CodebookParams& p) {
    const double lo = p.alpha_b * cw.i_max;
    const double hi = std::min(p.beta_b * cw.i_max, cw.i_min / p.alpha_b);
    return intensity >= lo && intensity <= hi;
}

int match_cell(const std::vector<Codeword>& cell, const double x[3], double intensity,
               const CodebookParams& p) {
    for (std::size_t i = 0; i < cell.size(); ++i) {
        const Codeword& cw = cell[i];
        if (colordist(x, cw.v) <= p.epsilon_color && brightness_ok(intensity, cw, p)) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void absorb_into_codeword(Codeword& cw, const double x[3], double intensity, std::int64_t now) {
    const double f = static_cast<double>(cw.freq);
    for (int c = 0; c < 3; ++c) cw.v[c] = (f * cw.v[c] + x[c]) / (f + 1.0);
    cw.i_min = std::min(cw.i_min, intensity);
    cw.i_max = std::max(cw.i_max, intensity);
    cw.freq += 1;
    cw.last_seen = now;
}

Codeword fresh_codeword(const double x[3], double intensity, std::int64_t now) {
    Codeword cw;
    cw.v[0] = x[0];
    cw.v[1] = x[1];
    cw.v[2] = x[2];
    cw.i_min = intensity;
    cw.i_max = intensity;
    cw.freq = 1;
    cw.mnrl = 0;
    cw.first_seen = now;
    cw.last_seen = now;
    return cw;
}

void pixel_vec(const Frame& f, std::size_t i, double x[3], double* intensity) {
    const std::size_t o = i * 3;
    x[0] = f.pixels[o];
    x[1] = f.pixels[o + 1];
    x[2] = f.pixels[o + 2];
    *intensity = x[0] + x[1] + x[2];
}

}  // namespace

CodebookModel::CodebookModel(int w, int h, const CodebookParams& p)
    : width(w), height(h), params(p), cells(static_cast<std::size_t>(w) * h) {
    if (w < 1 || h < 1) throw InvalidArgument("codebook dimensions must be at least 1x1");
}

int codebook_match(const CodebookModel& m, Rgb px_color, int px, int py) {
    if (px < 0 || px >= m.width || py < 0 || py >= m.height) {
        throw InvalidArgument("codebook_match: coordinate out of bounds");
    }
    const double x[3] = {static_cast<double>(px_color.r), static_cast<double>(px_color.g),
                         static_cast<double>(px_color.b)};
    const double intensity = x[0] + x[1] + x[2];
    return match_cell(m.cells[static_cast<std::size_t>(py) * m.width + px], x, intensity, m.params);
}

void codebook_train_frame(CodebookModel& m, const Frame& f) {
    if (f.width != m.width || f.height != m.height) {
        throw DimensionMismatch("training frame does not match model dimensions");
    }
    m.time += 1;
    const std::int64_t now = m.time;
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    for (std::size_t i = 0; i < n; ++i) {
        double x[3], intensity;
        pixel_vec(f, i, x, &intensity);
        auto& cell = m.cells[i];
        const int idx = match_cell(cell, x, intensity, m.params);
        if (idx >= 0) {
            Codeword& cw = cell[idx];
            cw.mnrl = std::max(cw.mnrl, now - cw.last_seen - 1);
            absorb_into_codeword(cw, x, intensity, now);
        } else {
            cell.push_back(fresh_codeword(x, intensity, now));
        }
    }
    m.trained_frames += 1;
}

void codebook_finish_training(CodebookModel& m) {
    const std::int64_t n = m.trained_frames;
    if (n <= 0) return;
    const std::int64_t half = n / 2;
    for (auto& cell : m.cells) {
        for (Codeword& cw : cell) {
            // Account for the unmatched stretch that wraps past the end of training.
            cw.mnrl = std::max(cw.mnrl, n - cw.last_seen + cw.first_seen - 1);
        }
        cell.erase(std::remove_if(cell.begin(), cell.end(),
                                  [half](const Codeword& cw) { return cw.mnrl > half; }),
                   cell.end());
    }
}

CodebookModel codebook_train(const std::vector<Frame>& frames, const CodebookParams& p,
                             int width, int height) {
    CodebookModel m(width, height, p);
    for (const Frame& f : frames) codebook_train_frame(m, f);
    codebook_finish_training(m);
    return m;
}

LightAction light_change_update(CodebookModel& m, const GrayFrame& prev, const GrayFrame& cur,
                                const Frame& frame, const LightChangePolicy& policy,
                                const BinaryMask* exclude) {
    if (prev.width != m.width || prev.height != m.height || cur.width != m.width ||
        cur.height != m.height || frame.width != m.width || frame.height != m.height) {
        throw DimensionMismatch("light_change_update: dimensions do not match the model");
    }

    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    std::vector<double> changes;
    changes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(cur.values[i] - prev.values[i]);
        if (d > policy.change_detect_floor) changes.push_back(d);
    }
    if (changes.empty() ||
        static_cast<double>(changes.size()) < policy.changed_pixel_fraction * static_cast<double>(n)) {
        return LightAction::none;
    }

    // Alpha is the median absolute change over the changed pixels.
    const std::size_t mid = changes.size() / 2;
    std::nth_element(changes.begin(), changes.begin() + mid, changes.end());
    const double alpha = changes[mid];

    const LightAction action = alpha < policy.alpha_soft_max ? LightAction::soft : LightAction::purge;

    if (action == LightAction::purge) {
        // Remove the stalest codewords model-wide before re-absorbing.
        std::vector<std::tuple<std::int64_t, std::size_t, std::size_t>> entries;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < m.cells[i].size(); ++c) {
                entries.emplace_back(m.cells[i][c].last_seen, i, c);
            }
        }
        const std::size_t remove =
            static_cast<std::size_t>(std::llround(policy.purge_fraction * static_cast<double>(entries.size())));
        if (remove > 0 && !entries.empty()) {
            std::sort(entries.begin(), entries.end());
            std::vector<std::vector<std::uint8_t>> doomed(n);
            for (std::size_t i = 0; i < n; ++i) doomed[i].assign(m.cells[i].size(), 0);
            for (std::size_t e = 0; e < std::min(remove, entries.size()); ++e) {
                doomed[std::get<1>(entries[e])][std::get<2>(entries[e])] = 1;
            }
            for (std::size_t i = 0; i < n; ++i) {
                auto& cell = m.cells[i];
                std::vector<Codeword> kept;
                kept.reserve(cell.size());
                for (std::size_t c = 0; c < cell.size(); ++c) {
                    if (!doomed[i][c]) kept.push_back(cell[c]);
                }
                cell = std::move(kept);
            }
        }
    }

    // Absorb the current appearance, skipping excluded pixels.
    m.time += 1;
    const std::int64_t now = m.time;
    for (std::size_t i = 0; i < n; ++i) {
        if (exclude != nullptr && exclude->bits[i] != 0) continue;
        double x[3], intensity;
        pixel_vec(frame, i, x, &intensity);
        auto& cell = m.cells[i];
        const int idx = match_cell(cell, x, intensity, m.params);
        if (idx >= 0) {
            absorb_into_codeword(cell[idx], x, intensity, now);
        } else {
            cell.push_back(fresh_codeword(x, intensity, now));
        }
    }
    return action;
}

// ---- Variant dispatch -------------------------------------------------------

BackgroundModel::BackgroundModel(BgVariant v, int w, int h, const CodebookParams& cp,
                                 const KalmanParams& kp)
    : variant(v), width(w), height(h) {
    if (w < 1 || h < 1) throw InvalidArgument("background model dimensions must be at least 1x1");
    if (v == BgVariant::codebook) {
        codebook = CodebookModel(w, h, cp);
    } else {
        kalman_params = kp;
        kalman_states.assign(static_cast<std::size_t>(w) * h, KalmanPixelState{});
        kalman_prev_fg.assign(static_cast<std::size_t>(w) * h, 0);
    }
}

void train_frame(BackgroundModel& m, const Frame& f) {
    if (f.width != m.width || f.height != m.height) {
        throw DimensionMismatch("training frame does not match model dimensions");
    }
    if (m.variant == BgVariant::codebook) {
        codebook_train_frame(m.codebook, f);
        return;
    }
    const GrayFrame gray = to_gray(f, GrayMode::mean);
    const std::size_t n = gray.values.size();
    if (!m.kalman_initialized) {
        for (std::size_t i = 0; i < n; ++i) m.kalman_states[i] = {gray.values[i], 0.0};
        m.kalman_initialized = true;
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        m.kalman_states[i] = kalman_update(m.kalman_states[i], gray.values[i], false, m.kalman_params);
    }
}

void finish_training(BackgroundModel& m, const Frame& last_calibration_frame) {
    if (m.variant == BgVariant::codebook) {
        codebook_finish_training(m.codebook);
        // Seed the classification state so maintenance has a mask to reason
        // about from the very first live frame.
        subtract_frame(m, last_calibration_frame);
    }
}

BinaryMask subtract_frame(BackgroundModel& m, const Frame& f) {
    if (f.width != m.width || f.height != m.height) {
        throw DimensionMismatch("frame does not match model dimensions");
    }
    BinaryMask mask(m.width, m.height);
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;

    if (m.variant == BgVariant::codebook) {
        CodebookModel& cb = m.codebook;
        cb.time += 1;
        const std::int64_t now = cb.time;
        for (std::size_t i = 0; i < n; ++i) {
            double x[3], intensity;
            pixel_vec(f, i, x, &intensity);
            auto& cell = cb.cells[i];
            const int idx = match_cell(cell, x, intensity, cb.params);
            if (idx >= 0) {
                // Steady state refreshes recency only at background pixels.
                cell[idx].freq += 1;
                cell[idx].last_seen = now;
            } else {
                mask.bits[i] = 1;
            }
        }
        cb.last_mask = mask;
        return mask;
    }

    if (!m.kalman_initialized) {
        // Untrained filter: everything is foreground, then adopt the frame.
        const GrayFrame gray = to_gray(f, GrayMode::mean);
        for (std::size_t i = 0; i < n; ++i) {
            mask.bits[i] = 1;
            m.kalman_states[i] = {gray.values[i], 0.0};
            m.kalman_prev_fg[i] = 1;
        }
        m.kalman_initialized = true;
        return mask;
    }

    const GrayFrame gray = to_gray(f, GrayMode::mean);
    for (std::size_t i = 0; i < n; ++i) {
        const double predicted = kalman_predicted(m.kalman_states[i], m.kalman_params);
        const bool fg = std::fabs(gray.values[i] - predicted) > m.kalman_params.fg_threshold;
        mask.bits[i] = fg ? 1 : 0;
        m.kalman_states[i] =
            kalman_update(m.kalman_states[i], gray.values[i], m.kalman_prev_fg[i] != 0, m.kalman_params);
        m.kalman_prev_fg[i] = fg ? 1 : 0;
    }
    return mask;
}

// ---- Serialization ----------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'P', 'V', 'B', 'G'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    // Little-endian on all supported targets.
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw IoError("model stream truncated");
    return v;
}

}  // namespace

void save_model(const BackgroundModel& m, std::ostream& out) {
    out.write(kMagic, 4);
    put<std::uint16_t>(out, kVersion);
    put<std::uint8_t>(out, m.variant == BgVariant::codebook ? 0 : 1);
    put<std::int32_t>(out, m.width);
    put<std::int32_t>(out, m.height);

    if (m.variant == BgVariant::codebook) {
        const CodebookModel& cb = m.codebook;
        put<double>(out, cb.params.epsilon_color);
        put<double>(out, cb.params.alpha_b);
        put<double>(out, cb.params.beta_b);
        put<std::int64_t>(out, cb.trained_frames);
        put<std::int64_t>(out, cb.time);
        for (const auto& cell : cb.cells) {
            put<std::uint32_t>(out, static_cast<std::uint32_t>(cell.size()));
            for (const Codeword& cw : cell) {
                put<double>(out, cw.v[0]);
                put<double>(out, cw.v[1]);
                put<double>(out, cw.v[2]);
                put<double>(out, cw.i_min);
                put<double>(out, cw.i_max);
                put<std::int64_t>(out, cw.freq);
                put<std::int64_t>(out, cw.mnrl);
                put<std::int64_t>(out, cw.first_seen);
                put<std::int64_t>(out, cw.last_seen);
            }
        }
    } else {
        put<double>(out, m.kalman_params.a[0][0]);
        put<double>(out, m.kalman_params.a[0][1]);
        put<double>(out, m.kalman_params.a[1][0]);
        put<double>(out, m.kalman_params.a[1][1]);
        put<double>(out, m.kalman_params.h[0]);
        put<double>(out, m.kalman_params.h[1]);
        put<double>(out, m.kalman_params.rate_slow);
        put<double>(out, m.kalman_params.rate_fast);
        put<double>(out, m.kalman_params.fg_threshold);
        put<std::uint8_t>(out, m.kalman_initialized ? 1 : 0);
        for (std::size_t i = 0; i < m.kalman_states.size(); ++i) {
            put<double>(out, m.kalman_states[i].b);
            put<double>(out, m.kalman_states[i].b_dot);
            put<std::uint8_t>(out, m.kalman_prev_fg[i]);
        }
    }
    if (!out) throw IoError("model write failed");
}

BackgroundModel load_model(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a PVBG model file");
    const auto version = get<std::uint16_t>(in);
    if (version != kVersion) throw IoError("unsupported PVBG model version");
    const auto variant = get<std::uint8_t>(in);
    const auto width = get<std::int32_t>(in);
    const auto height = get<std::int32_t>(in);
    if (width < 1 || height < 1 || variant > 1) throw IoError("corrupt PVBG model header");

    BackgroundModel m(variant == 0 ? BgVariant::codebook : BgVariant::kalman, width, height,
                      CodebookParams{}, KalmanParams{});

    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (m.variant == BgVariant::codebook) {
        CodebookModel& cb = m.codebook;
        cb.params.epsilon_color = get<double>(in);
        cb.params.alpha_b = get<double>(in);
        cb.params.beta_b = get<double>(in);
        cb.trained_frames = get<std::int64_t>(in);
        cb.time = get<std::int64_t>(in);
        for (std::size_t i = 0; i < n; ++i) {
            const auto count = get<std::uint32_t>(in);
            if (count > 1'000'000u) throw IoError("corrupt PVBG codeword count");
            auto& cell = cb.cells[i];
            cell.resize(count);
            for (Codeword& cw : cell) {
                cw.v[0] = get<double>(in);
                cw.v[1] = get<double>(in);
                cw.v[2] = get<double>(in);
                cw.i_min = get<double>(in);
                cw.i_max = get<double>(in);
                cw.freq = get<std::int64_t>(in);
                cw.mnrl = get<std::int64_t>(in);
                cw.first_seen = get<std::int64_t>(in);
                cw.last_seen = get<std::int64_t>(in);
            }
        }
    } else {
        m.kalman_params.a[0][0] = get<double>(in);
        m.kalman_params.a[0][1] = get<double>(in);
        m.kalman_params.a[1][0] = get<double>(in);
        m.kalman_params.a[1][1] = get<double>(in);
        m.kalman_params.h[0] = get<double>(in);
        m.kalman_params.h[1] = get<double>(in);
        m.kalman_params.rate_slow = get<double>(in);
        m.kalman_params.rate_fast = get<double>(in);
        m.kalman_params.fg_threshold = get<double>(in);
        m.kalman_initialized = get<std::uint8_t>(in) != 0;
        for (std::size_t i = 0; i < n; ++i) {
            m.kalman_states[i].b = get<double>(in);
            m.kalman_states[i].b_dot = get<double>(in);
            m.kalman_prev_fg[i] = get<std::uint8_t>(in);
        }
    }
    return m;
}

}  // namespace pv
