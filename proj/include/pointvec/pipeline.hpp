#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pointvec/background.hpp"
#include "pointvec/config.hpp"
#include "pointvec/image.hpp"
#include "pointvec/pointing.hpp"
#include "pointvec/skin.hpp"
#include "pointvec/types.hpp"

namespace pv {

// Face rectangles keyed by frame index. A frame without its own entry reuses
// the latest entry before it; frames before the first entry have none.
class FaceTrack {
public:
    // One entry per line: "frame_index x y w h"; '#' comments and blank lines
    // are skipped. Entries must be sorted by frame index.
    static FaceTrack parse(const std::string& text);
    static FaceTrack load(const std::string& path);

    void add(int frame_index, const Rect& r);
    std::optional<Rect> lookup(int frame_index) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<std::pair<int, Rect>> entries_;
};

struct FrameResult {
    int frame = 0;  // global 0-based frame index, calibration frames included
    Gesture gesture = Gesture::no_hand;
    std::optional<PointD> fingertip;
    std::optional<double> angle_cog;
    std::optional<double> angle_next_defect;
    std::optional<double> angle_bisector;
    std::optional<PreferredHand> hand_used;
    LightAction light_action = LightAction::none;
    std::vector<std::string> notes;
    std::map<std::string, double> ms;  // per-stage milliseconds, all stages always present
    PointingDiagnostics diag;          // drawing payload for annotation
    std::optional<Rect> face;          // face rect in effect this frame
};

// One JSON Lines record (no trailing newline). Stage timings are emitted
// only when asked for, so repeated runs stay byte-identical.
std::string result_json(const FrameResult& r, bool include_timing);

// Stateful frame-by-frame runner: background calibration, live forehead skin
// template, back-projection, blob selection, gesture classification, and the
// illumination maintenance policy. Copyable; a copy continues independently.
class Pipeline {
public:
    explicit Pipeline(const PipelineConfig& cfg);

    // Feeds one frame. Returns nothing while the background model is still
    // calibrating; afterwards, one result per frame. The face rectangle (when
    // given) must lie within the frame; it is remembered for later frames.
    std::optional<FrameResult> process(const Frame& f, const std::optional<Rect>& face);

    const PipelineConfig& config() const { return cfg_; }
    int frames_seen() const { return frames_seen_; }
    bool calibrated() const { return model_init_ && frames_seen_ >= cfg_.calibration; }

    // Current skin template in the plain-text histogram format.
    std::string skin_histogram_text() const;

    // Background model persistence (the PVBG container). Loading puts the
    // pipeline right after the covered portion of calibration.
    void save_model(std::ostream& out) const;
    void load_model(std::istream& in);

private:
    void ensure_model(const Frame& f);
    void refresh_skin_template(const Frame& f, const Rect& face, std::vector<std::string>* notes);

    PipelineConfig cfg_;
    BackgroundModel model_;
    bool model_init_ = false;
    int frames_seen_ = 0;

    GrayFrame prev_gray_;
    bool have_prev_ = false;

    std::optional<SkinHistogram> skin_hist_;
    SkinHistogram uniform_hist_;
    SkinHistogram nonskin_accum_;
    bool nonskin_ready_ = false;
    int nonskin_frames_ = 0;

    std::optional<Rect> last_face_;
};

}  // namespace pv
