#include "pointvec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pointvec/error.hpp"

namespace pv {

// ---- FaceTrack ----------------------------------------------------------------

FaceTrack FaceTrack::parse(const std::string& text) {
    FaceTrack out;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream fields(raw);
        int frame, x, y, w, h;
        if (!(fields >> frame)) continue;  // blank line
        if (!(fields >> x >> y >> w >> h)) {
            throw IoError("face sidecar line " + std::to_string(line_no) +
                          ": expected 'frame_index x y w h'");
        }
        std::string extra;
        if (fields >> extra) {
            throw IoError("face sidecar line " + std::to_string(line_no) + ": trailing data");
        }
        out.add(frame, {x, y, w, h});
    }
    return out;
}

FaceTrack FaceTrack::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read face sidecar: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void FaceTrack::add(int frame_index, const Rect& r) {
    if (frame_index < 0) throw InvalidArgument("face sidecar frame index must be >= 0");
    if (r.w <= 0 || r.h <= 0) throw InvalidArgument("face rectangle must have positive size");
    if (!entries_.empty() && entries_.back().first >= frame_index) {
        throw InvalidArgument("face sidecar entries must be sorted by frame index");
    }
    entries_.emplace_back(frame_index, r);
}

std::optional<Rect> FaceTrack::lookup(int frame_index) const {
    std::optional<Rect> out;
    for (const auto& [idx, rect] : entries_) {
        if (idx > frame_index) break;
        out = rect;
    }
    return out;
}

// ---- JSON record ----------------------------------------------------------------

std::string result_json(const FrameResult& r, bool include_timing) {
    nlohmann::ordered_json j;
    j["frame"] = r.frame;
    j["gesture"] = to_string(r.gesture);
    if (r.fingertip) {
        j["fingertip"] = {static_cast<std::int64_t>(std::llround(r.fingertip->x)),
                          static_cast<std::int64_t>(std::llround(r.fingertip->y))};
    }
    if (r.angle_cog || r.angle_next_defect || r.angle_bisector) {
        nlohmann::ordered_json angles;
        if (r.angle_cog) angles["cog"] = *r.angle_cog;
        if (r.angle_next_defect) angles["next_defect"] = *r.angle_next_defect;
        if (r.angle_bisector) angles["bisector"] = *r.angle_bisector;
        j["angles"] = angles;
    }
    if (r.hand_used) j["hand"] = *r.hand_used == PreferredHand::left ? "left" : "right";
    if (include_timing) {
        nlohmann::ordered_json ms;
        for (const char* key :
             {"subtract", "skin", "components", "classify", "light_change", "total"}) {
            const auto it = r.ms.find(key);
            if (it != r.ms.end()) ms[key] = it->second;
        }
        j["ms"] = ms;
    }
    if (r.light_action != LightAction::none) {
        j["light_action"] = r.light_action == LightAction::soft ? "soft" : "purge";
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j.dump();
}

// ---- Pipeline ----------------------------------------------------------------

Pipeline::Pipeline(const PipelineConfig& cfg)
    : cfg_(cfg),
      uniform_hist_(uniform_histogram(cfg.skin)),
      nonskin_accum_(cfg.skin.h_bins, cfg.skin.s_bins) {}

void Pipeline::ensure_model(const Frame& f) {
    if (!model_init_) {
        model_ = BackgroundModel(cfg_.variant, f.width, f.height, cfg_.codebook, cfg_.kalman);
        model_init_ = true;
    } else if (f.width != model_.width || f.height != model_.height) {
        throw DimensionMismatch("frame " + std::to_string(frames_seen_) +
                                ": dimensions changed mid-stream");
    }
}

void Pipeline::refresh_skin_template(const Frame& f, const Rect& face,
                                     std::vector<std::string>* notes) {
    if (face.w < 3 || face.h < 10) {
        if (notes != nullptr) notes->push_back("face rect too small for forehead sampling");
        return;
    }
    skin_hist_ = build_histogram(f, forehead_from_face(face), nullptr, cfg_.skin);
}

std::optional<FrameResult> Pipeline::process(const Frame& f, const std::optional<Rect>& face_in) {
    ensure_model(f);
    if (face_in) {
        if (face_in->w <= 0 || face_in->h <= 0 || face_in->x < 0 || face_in->y < 0 ||
            face_in->x + face_in->w > f.width || face_in->y + face_in->h > f.height) {
            throw InvalidArgument("face rectangle leaves the frame");
        }
        last_face_ = face_in;
    }
    const std::optional<Rect> face = last_face_;
    frames_seen_ += 1;

    const GrayFrame cur_gray = to_gray(f, GrayMode::mean);
    if (frames_seen_ <= cfg_.calibration) {
        train_frame(model_, f);
        if (frames_seen_ == cfg_.calibration) finish_training(model_, f);
        if (face) refresh_skin_template(f, *face, nullptr);
        prev_gray_ = cur_gray;
        have_prev_ = true;
        return std::nullopt;
    }

    using Clock = std::chrono::steady_clock;
    const auto elapsed_ms = [](Clock::time_point a, Clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    FrameResult r;
    r.frame = frames_seen_ - 1;
    r.face = face;

    const auto t_start = Clock::now();
    BinaryMask fg = subtract_frame(model_, f);
    const auto t_subtract = Clock::now();
    r.ms["subtract"] = elapsed_ms(t_start, t_subtract);

    if (face) refresh_skin_template(f, *face, &r.notes);
    const bool have_template = skin_hist_.has_value();
    BinaryMask skin_mask;
    if (have_template) {
        const SkinHistogram& hn = nonskin_ready_ ? nonskin_accum_ : uniform_hist_;
        const GrayFrame prob = backproject(f, fg, *skin_hist_, hn, cfg_.skin);
        skin_mask = binarize(prob, cfg_.skin.theta);
    }
    const auto t_skin = Clock::now();
    r.ms["skin"] = elapsed_ms(t_subtract, t_skin);

    std::vector<Blob> blobs;
    if (have_template) blobs = connected_components(skin_mask);
    const auto t_components = Clock::now();
    r.ms["components"] = elapsed_ms(t_skin, t_components);

    BodyAssignment body;
    if (have_template) {
        body = select_body_blobs(blobs, scaled_min_area(cfg_.pointing, f.width, f.height));
        const Blob* first = nullptr;
        const Blob* second = nullptr;
        PreferredHand first_side = cfg_.preferred_hand;
        if (cfg_.preferred_hand == PreferredHand::right) {
            first = body.right_hand ? &*body.right_hand : nullptr;
            second = body.left_hand ? &*body.left_hand : nullptr;
        } else {
            first = body.left_hand ? &*body.left_hand : nullptr;
            second = body.right_hand ? &*body.right_hand : nullptr;
        }
        if (first == nullptr && second != nullptr) {
            std::swap(first, second);
            first_side =
                cfg_.preferred_hand == PreferredHand::right ? PreferredHand::left : PreferredHand::right;
        }
        if (first != nullptr) {
            PointingDecision decision = classify_pointing(*first, cfg_.pointing, f.width, f.height);
            PreferredHand side = first_side;
            if (decision.gesture != Gesture::pointing && second != nullptr) {
                PointingDecision alt = classify_pointing(*second, cfg_.pointing, f.width, f.height);
                if (alt.gesture == Gesture::pointing) {
                    decision = std::move(alt);
                    side = first_side == PreferredHand::right ? PreferredHand::left
                                                              : PreferredHand::right;
                }
            }
            r.gesture = decision.gesture;
            r.fingertip = decision.fingertip;
            r.angle_cog = decision.angle_cog;
            r.angle_next_defect = decision.angle_next_defect;
            r.angle_bisector = decision.angle_bisector;
            r.hand_used = side;
            for (const std::string& n : decision.diag.notes) r.notes.push_back(n);
            r.diag = std::move(decision.diag);
        } else {
            r.gesture = Gesture::no_hand;
        }
    } else {
        r.gesture = Gesture::not_pointing;
        r.notes.push_back("no skin template");
    }
    const auto t_classify = Clock::now();
    r.ms["classify"] = elapsed_ms(t_components, t_classify);

    // Non-skin table accumulation: foreground pixels away from the face.
    if (cfg_.skin.nonskin_mode == NonskinMode::foreground && !nonskin_ready_) {
        BinaryMask sample = fg;
        if (face) {
            for (int y = face->y; y < face->y + face->h; ++y) {
                for (int x = face->x; x < face->x + face->w; ++x) {
                    sample.set(x, y, false);
                }
            }
        }
        add_histogram_samples(nonskin_accum_, f, {0, 0, f.width, f.height}, &sample, cfg_.skin);
        nonskin_frames_ += 1;
        if (nonskin_frames_ >= cfg_.skin.skin_calibration && nonskin_accum_.total > 0) {
            nonskin_ready_ = true;
        }
    }

    if (cfg_.variant == BgVariant::codebook && have_prev_) {
        BinaryMask exclude(f.width, f.height);
        for (const std::optional<Blob>* part : {&body.head, &body.left_hand, &body.right_hand}) {
            if (!part->has_value()) continue;
            for (const PointI& px : (*part)->pixels) exclude.set(px.x, px.y, true);
        }
        r.light_action =
            light_change_update(model_.codebook, prev_gray_, cur_gray, f, cfg_.light, &exclude);
    }
    const auto t_light = Clock::now();
    r.ms["light_change"] = elapsed_ms(t_classify, t_light);

    prev_gray_ = cur_gray;
    have_prev_ = true;
    r.ms["total"] = elapsed_ms(t_start, Clock::now());
    return r;
}

std::string Pipeline::skin_histogram_text() const {
    if (!skin_hist_) throw StateError("no skin template has been built yet");
    return histogram_text(*skin_hist_);
}

void Pipeline::save_model(std::ostream& out) const {
    if (!model_init_) throw StateError("no background model to save yet");
    pv::save_model(model_, out);
}

void Pipeline::load_model(std::istream& in) {
    model_ = pv::load_model(in);
    model_init_ = true;
    if (model_.variant == BgVariant::codebook) {
        frames_seen_ = static_cast<int>(
            std::min<std::int64_t>(model_.codebook.trained_frames, cfg_.calibration));
    } else {
        frames_seen_ = model_.kalman_initialized ? cfg_.calibration : 0;
    }
    have_prev_ = false;  // the light policy re-arms on the next frame
}

}  // namespace pv
