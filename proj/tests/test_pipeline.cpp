#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pointvec/annotate.hpp"
#include "pointvec/config.hpp"
#include "pointvec/error.hpp"
#include "pointvec/eval.hpp"
#include "pointvec/pipeline.hpp"
#include "pointvec/synth.hpp"

using namespace pv;

namespace {

// Small fast setup shared by the pipeline cases: a low-resolution room and a
// config with a short calibration phase.
PipelineConfig small_config(int calibration = 5) {
    PipelineConfig cfg;
    cfg.calibration = calibration;
    return cfg;
}

// Runs the calibration phase against the static room and returns the pipeline
// ready for live frames.
Pipeline calibrated_pipeline(const PipelineConfig& cfg, std::uint64_t bg_seed, int w, int h) {
    Pipeline p(cfg);
    const Frame room = synth_background(bg_seed, w, h, 0);
    for (int i = 0; i < cfg.calibration; ++i) {
        CHECK_FALSE(p.process(room, std::nullopt).has_value());
    }
    return p;
}

}  // namespace

TEST_CASE("rendered configuration text parses back to the same configuration") {
    const PipelineConfig defaults;
    const std::string text = config_text(defaults);
    const PipelineConfig reparsed = parse_config(text);
    CHECK(config_text(reparsed) == text);

    PipelineConfig custom;
    custom.variant = BgVariant::kalman;
    custom.calibration = 12;
    custom.skin.theta = 0.42;
    custom.pointing.min_defect_depth = 2.5;
    custom.pointing.fingertip_rule = FingertipRule::ep;
    custom.pointing.index_band_mode = IndexBandMode::curvature;
    custom.preferred_hand = PreferredHand::left;
    custom.pointing.secondary_band_enabled = true;
    custom.pointing.secondary_band_lo = 100.0;
    custom.pointing.secondary_band_hi = 120.0;

    const PipelineConfig back = parse_config(config_text(custom));
    CHECK(back.variant == BgVariant::kalman);
    CHECK(back.calibration == 12);
    CHECK(back.skin.theta == doctest::Approx(0.42));
    CHECK(back.pointing.min_defect_depth == doctest::Approx(2.5));
    CHECK(back.pointing.fingertip_rule == FingertipRule::ep);
    CHECK(back.pointing.index_band_mode == IndexBandMode::curvature);
    CHECK(back.preferred_hand == PreferredHand::left);
    CHECK(back.pointing.secondary_band_enabled);
    CHECK(back.pointing.secondary_band_lo == doctest::Approx(100.0));
    CHECK(config_text(back) == config_text(custom));
}

TEST_CASE("empty configuration text means every default") {
    const PipelineConfig cfg = parse_config("");
    CHECK(config_text(cfg) == config_text(PipelineConfig{}));
    CHECK(cfg.calibration == 30);
    CHECK(cfg.pointing.min_blob_area == 200);
    CHECK_FALSE(cfg.pointing.secondary_band_enabled);
}

TEST_CASE("comments, blank lines, and spacing are tolerated in config text") {
    const PipelineConfig cfg = parse_config(
        "# room setup\n"
        "\n"
        "  variant = kalman  \n"
        "calibration=12\n"
        "theta = 0.3   # looser skin gate\n");
    CHECK(cfg.variant == BgVariant::kalman);
    CHECK(cfg.calibration == 12);
    CHECK(cfg.skin.theta == doctest::Approx(0.3));
}

TEST_CASE("configuration errors name the offending key") {
    CHECK_THROWS_AS(parse_config("no_such_key = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config("calibration = soon"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha_b = 1.5"), ConfigError);
    CHECK_THROWS_AS(parse_config("theta = 1.5"), ConfigError);
    CHECK_THROWS_AS(parse_config("theta ="), ConfigError);
    CHECK_THROWS_AS(parse_config("just words"), ConfigError);
    CHECK_THROWS_AS(parse_config("secondary_band_lo = 100"), ConfigError);
    CHECK_THROWS_AS(parse_config("rate_slow = 0.6\nrate_fast = 0.4"), ConfigError);
    CHECK_THROWS_AS(parse_config("resample_points = 4"), ConfigError);

    try {
        parse_config("beta_b = 0.5");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("beta_b") != std::string::npos);
    }
}

TEST_CASE("missing config file reads as an I/O error") {
    CHECK_THROWS_AS(load_config("/nonexistent/room.conf"), IoError);
}

TEST_CASE("face track keeps the latest rectangle at or before each frame") {
    const FaceTrack t = FaceTrack::parse(
        "# detector output\n"
        "\n"
        "3 10 12 40 50\n"
        "8 14 12 42 52   # re-detected\n");
    CHECK(t.size() == 2);
    CHECK_FALSE(t.lookup(0).has_value());
    CHECK_FALSE(t.lookup(2).has_value());
    REQUIRE(t.lookup(3).has_value());
    CHECK(t.lookup(3)->x == 10);
    CHECK(t.lookup(5)->x == 10);   // holds until the next entry
    CHECK(t.lookup(8)->x == 14);
    CHECK(t.lookup(100)->w == 42);
}

TEST_CASE("face track rejects malformed rows but skips non-numeric chatter") {
    // A row whose first token is not a number reads as blank and is skipped.
    CHECK(FaceTrack::parse("detector warming up\n5 1 2 10 20\n").size() == 1);

    CHECK_THROWS_AS(FaceTrack::parse("5 1 2 10\n"), IoError);  // one field short
    try {
        FaceTrack::parse("5 1 2 10 20\n9 1 2 10 20 7\n");
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        const std::string what = e.what();
        CHECK(what.find("line 2") != std::string::npos);
        CHECK(what.find("trailing data") != std::string::npos);
    }

    CHECK_THROWS_AS(FaceTrack::parse("5 1 2 10 20\n5 1 2 10 20\n"), InvalidArgument);
    CHECK_THROWS_AS(FaceTrack::parse("9 1 2 10 20\n5 1 2 10 20\n"), InvalidArgument);
    CHECK_THROWS_AS(FaceTrack::parse("-1 1 2 10 20\n"), InvalidArgument);
    CHECK_THROWS_AS(FaceTrack::parse("5 1 2 0 20\n"), InvalidArgument);
}

TEST_CASE("pipeline stays silent through calibration and reports afterwards") {
    const PipelineConfig cfg = small_config(5);
    Pipeline p(cfg);
    const Frame room = synth_background(3, 64, 48, 0);
    for (int i = 0; i < 5; ++i) {
        CHECK_FALSE(p.process(room, std::nullopt).has_value());
        CHECK(p.frames_seen() == i + 1);
    }
    CHECK(p.calibrated());

    const auto r = p.process(room, std::nullopt);
    REQUIRE(r.has_value());
    CHECK(r->frame == 5);  // global index counts calibration frames
    for (const char* stage :
         {"subtract", "skin", "components", "classify", "light_change", "total"}) {
        CHECK(r->ms.count(stage) == 1);
    }
}

TEST_CASE("no face rectangle means no skin template and an honest note") {
    const PipelineConfig cfg = small_config(4);
    Pipeline p = calibrated_pipeline(cfg, 11, 64, 48);
    const auto r = p.process(synth_background(11, 64, 48, 0), std::nullopt);
    REQUIRE(r.has_value());
    CHECK(r->gesture == Gesture::not_pointing);
    REQUIRE(!r->notes.empty());
    CHECK(r->notes[0] == "no skin template");
    CHECK_THROWS_AS(p.skin_histogram_text(), StateError);
}

TEST_CASE("a face rectangle too small to sample is noted and skipped") {
    const PipelineConfig cfg = small_config(4);
    Pipeline p = calibrated_pipeline(cfg, 11, 64, 48);
    const auto r = p.process(synth_background(11, 64, 48, 0), Rect{5, 5, 2, 20});
    REQUIRE(r.has_value());
    bool noted = false;
    for (const auto& n : r->notes) {
        if (n.find("too small") != std::string::npos) noted = true;
    }
    CHECK(noted);
    CHECK(r->gesture == Gesture::not_pointing);  // still no usable template
}

TEST_CASE("frame dimension changes and runaway face rectangles are rejected") {
    const PipelineConfig cfg = small_config(3);
    Pipeline p(cfg);
    p.process(synth_background(2, 64, 48, 0), std::nullopt);
    CHECK_THROWS_AS(p.process(synth_background(2, 32, 24, 0), std::nullopt), DimensionMismatch);

    Pipeline q(cfg);
    CHECK_THROWS_AS(q.process(synth_background(2, 64, 48, 0), Rect{60, 5, 10, 10}),
                    InvalidArgument);
    CHECK_THROWS_AS(q.process(synth_background(2, 64, 48, 0), Rect{-1, 5, 10, 10}),
                    InvalidArgument);
}

TEST_CASE("result records serialize exactly the fields the frame produced") {
    FrameResult r;
    r.frame = 7;
    r.gesture = Gesture::pointing;
    r.fingertip = PointD{12.4, 8.6};
    r.angle_cog = 41.0;
    r.angle_next_defect = 43.5;
    r.angle_bisector = 42.25;
    r.hand_used = PreferredHand::left;
    r.light_action = LightAction::purge;
    r.notes = {"first note", "second note"};
    r.ms = {{"subtract", 1.0}, {"skin", 2.0},         {"components", 3.0},
            {"classify", 4.0}, {"light_change", 5.0}, {"total", 15.0}};

    const std::string line = result_json(r, false);
    CHECK(result_json(r, false) == line);  // byte-stable
    const auto j = nlohmann::json::parse(line);
    CHECK(j["frame"] == 7);
    CHECK(j["gesture"] == "pointing");
    CHECK(j["fingertip"] == nlohmann::json({12, 9}));  // rounded to pixels
    CHECK(j["angles"]["cog"] == doctest::Approx(41.0));
    CHECK(j["angles"]["next_defect"] == doctest::Approx(43.5));
    CHECK(j["angles"]["bisector"] == doctest::Approx(42.25));
    CHECK(j["hand"] == "left");
    CHECK(j["light_action"] == "purge");
    CHECK(j["notes"] == nlohmann::json({"first note", "second note"}));
    CHECK_FALSE(j.contains("ms"));  // timing only on request

    const auto jt = nlohmann::json::parse(result_json(r, true));
    REQUIRE(jt.contains("ms"));
    CHECK(jt["ms"].size() == 6);
    // The stage keys are emitted in pipeline order.
    const std::string timed = result_json(r, true);
    std::size_t last = 0;
    for (const char* stage :
         {"subtract", "skin", "components", "classify", "light_change", "total"}) {
        const std::size_t pos = timed.find(std::string("\"") + stage + "\"");
        REQUIRE(pos != std::string::npos);
        CHECK(pos > last);
        last = pos;
    }
}

TEST_CASE("quiet results leave every optional field out") {
    FrameResult r;
    r.frame = 3;
    r.gesture = Gesture::not_pointing;
    const auto j = nlohmann::json::parse(result_json(r, false));
    CHECK(j["gesture"] == "not_pointing");
    CHECK_FALSE(j.contains("fingertip"));
    CHECK_FALSE(j.contains("angles"));
    CHECK_FALSE(j.contains("hand"));
    CHECK_FALSE(j.contains("light_action"));
    CHECK_FALSE(j.contains("notes"));
}

TEST_CASE("synthetic scenes are deterministic and carry consistent truth") {
    SceneSpec spec;
    spec.gesture = SceneGesture::pointing;
    spec.angle_deg = 30.0;
    spec.seed = 77;
    spec.bg_seed = 5;
    spec.width = 320;
    spec.height = 240;

    const SyntheticScene a = synth_scene(spec);
    const SyntheticScene b = synth_scene(spec);
    CHECK(a.frame == b.frame);
    CHECK(a.truth.pointing == b.truth.pointing);
    CHECK(a.truth.fingertip.x == b.truth.fingertip.x);
    CHECK(a.truth.fingertip.y == b.truth.fingertip.y);

    CHECK(a.truth.pointing);
    CHECK(a.truth.angle_deg == doctest::Approx(30.0));
    CHECK(a.truth.fingertip.x >= 0);
    CHECK(a.truth.fingertip.x < spec.width);
    CHECK(a.truth.fingertip.y >= 0);
    CHECK(a.truth.fingertip.y < spec.height);
    CHECK(a.truth.face.x >= 0);
    CHECK(a.truth.face.y >= 0);
    CHECK(a.truth.face.x + a.truth.face.w <= spec.width);
    CHECK(a.truth.face.y + a.truth.face.h <= spec.height);

    // The truth fingertip sits on rendered content, not bare backdrop.
    const Frame room = synth_background(spec.bg_seed, spec.width, spec.height, 0);
    const PointI tip = a.truth.fingertip;
    CHECK_FALSE(room.at(tip.x, tip.y) == a.frame.at(tip.x, tip.y));

    SceneSpec palm = spec;
    palm.gesture = SceneGesture::palm;
    CHECK_FALSE(synth_scene(palm).truth.pointing);
    SceneSpec fist = spec;
    fist.gesture = SceneGesture::fist;
    CHECK_FALSE(synth_scene(fist).truth.pointing);
}

TEST_CASE("angular differences wrap around the circle") {
    CHECK(circular_diff_deg(10.0, 350.0) == doctest::Approx(20.0));
    CHECK(circular_diff_deg(350.0, 10.0) == doctest::Approx(20.0));
    CHECK(circular_diff_deg(0.0, 0.0) == doctest::Approx(0.0));
    CHECK(circular_diff_deg(90.0, 270.0) == doctest::Approx(180.0));
    CHECK(circular_diff_deg(359.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("evaluation scores detections against truth frame by frame") {
    const std::string truth =
        "{\"frame\":0,\"pointing\":true,\"angle\":90}\n"
        "{\"frame\":1,\"pointing\":false}\n";
    const std::string results =
        "{\"frame\":0,\"gesture\":\"pointing\",\"angles\":{\"cog\":100.0,\"next_defect\":95.0,"
        "\"bisector\":92.0}}\n"
        "{\"frame\":1,\"gesture\":\"not_pointing\"}\n";

    const EvalReport r = evaluate(results, truth);
    CHECK(r.tp == 1);
    CHECK(r.tn == 1);
    CHECK(r.fp == 0);
    CHECK(r.fn == 0);
    CHECK(r.tp_rate == doctest::Approx(100.0));
    CHECK(r.tn_rate == doctest::Approx(100.0));
    REQUIRE(r.cog.errors.size() == 1);
    CHECK(r.cog.errors[0] == doctest::Approx(10.0));
    CHECK(r.next_defect.errors[0] == doctest::Approx(5.0));
    CHECK(r.bisector.errors[0] == doctest::Approx(2.0));

    const std::string text = eval_text(r);
    CHECK(text.find("TP 1 (100.0%)") != std::string::npos);
    const auto j = nlohmann::json::parse(eval_json(r));
    CHECK(j["tp"] == 1);
    CHECK(j["angle_error"]["bisector"]["median"] == doctest::Approx(2.0));
}

TEST_CASE("one false alarm among ten quiet frames is a ten percent false-positive rate") {
    std::string truth, results;
    for (int i = 0; i < 10; ++i) {
        truth += "{\"frame\":" + std::to_string(i) + ",\"pointing\":false}\n";
        results += "{\"frame\":" + std::to_string(i) + ",\"gesture\":\"" +
                   (i == 4 ? "pointing" : "not_pointing") + "\"}\n";
    }
    const EvalReport r = evaluate(results, truth);
    CHECK(r.fp == 1);
    CHECK(r.tn == 9);
    CHECK(r.fp_rate == doctest::Approx(10.0));
    CHECK(r.tn_rate == doctest::Approx(90.0));
    CHECK(r.tp_rate == doctest::Approx(0.0));  // no pointing frames at all
}

TEST_CASE("medians and percentiles use the nearest-rank convention") {
    std::string truth, results;
    for (int i = 0; i < 10; ++i) {
        truth += "{\"frame\":" + std::to_string(i) + ",\"pointing\":true,\"angle\":0}\n";
        results += "{\"frame\":" + std::to_string(i) +
                   ",\"gesture\":\"pointing\",\"angles\":{\"cog\":" + std::to_string(i + 1) +
                   ".0}}\n";
    }
    const EvalReport r = evaluate(results, truth);
    REQUIRE(r.cog.errors.size() == 10);
    CHECK(r.cog.median == doctest::Approx(5.0));  // rank ceil(0.5*10) = 5
    CHECK(r.cog.p90 == doctest::Approx(9.0));     // rank ceil(0.9*10) = 9
    CHECK(r.next_defect.errors.empty());
    CHECK(r.next_defect.median == doctest::Approx(0.0));
}

TEST_CASE("evaluation refuses mismatched or malformed inputs") {
    const std::string one = "{\"frame\":0,\"pointing\":false}\n";
    const std::string two = one + "{\"frame\":1,\"pointing\":false}\n";
    const std::string res_one = "{\"frame\":0,\"gesture\":\"not_pointing\"}\n";
    const std::string res_shifted = "{\"frame\":5,\"gesture\":\"not_pointing\"}\n";

    CHECK_THROWS_AS(evaluate(res_one, two), InvalidArgument);      // different sizes
    CHECK_THROWS_AS(evaluate(res_shifted, one), InvalidArgument);  // same size, wrong frames
    CHECK_THROWS_AS(evaluate("not json\n", one), IoError);
    CHECK_THROWS_AS(evaluate("{\"gesture\":\"x\"}\n", one), IoError);  // no frame field
    CHECK_THROWS_AS(evaluate(res_one + res_one, two), IoError);        // duplicate frame
}

TEST_CASE("a pointing scene flows through the pipeline to a located fingertip") {
    PipelineConfig cfg = small_config(30);
    Pipeline p(cfg);

    SceneSpec spec;
    spec.gesture = SceneGesture::pointing;
    spec.angle_deg = 40.0;
    spec.seed = 21;
    spec.bg_seed = 9;

    const Frame room = synth_background(spec.bg_seed, spec.width, spec.height, 0);
    for (int i = 0; i < cfg.calibration; ++i) {
        CHECK_FALSE(p.process(room, std::nullopt).has_value());
    }

    const SyntheticScene scene = synth_scene(spec);
    const auto r = p.process(scene.frame, scene.truth.face);
    REQUIRE(r.has_value());
    REQUIRE(r->gesture == Gesture::pointing);
    REQUIRE(r->fingertip.has_value());
    REQUIRE(r->angle_cog.has_value());
    REQUIRE(r->angle_next_defect.has_value());
    REQUIRE(r->angle_bisector.has_value());
    REQUIRE(r->hand_used.has_value());
    CHECK(*r->hand_used == PreferredHand::right);

    const double tip_err = std::hypot(r->fingertip->x - scene.truth.fingertip.x,
                                      r->fingertip->y - scene.truth.fingertip.y);
    CHECK(tip_err <= 6.0);
    CHECK(circular_diff_deg(*r->angle_bisector, spec.angle_deg) <= 10.0);

    // The per-frame skin template is live now, and annotation draws on a copy.
    CHECK(p.skin_histogram_text().rfind("30 32 ", 0) == 0);
    const Frame drawn = annotate(scene.frame, *r);
    CHECK(drawn.width == scene.frame.width);
    CHECK(drawn.height == scene.frame.height);
    CHECK_FALSE(drawn == scene.frame);
}

TEST_CASE("annotation copes with a fingertip on the frame border and empty diagnostics") {
    FrameResult r;
    r.frame = 0;
    r.gesture = Gesture::pointing;
    r.fingertip = PointD{0.0, 0.0};
    r.angle_bisector = 225.0;  // ray leaves the frame immediately
    r.face = Rect{0, 0, 3, 10};
    const Frame blank = synth_background(1, 32, 24, 0);
    const Frame drawn = annotate(blank, r);
    CHECK(drawn.width == 32);
    CHECK_FALSE(drawn == blank);
}

TEST_CASE("a saved background model resumes exactly where it left off") {
    PipelineConfig cfg = small_config(10);
    const int w = 320, h = 240;  // scenes render at camera resolutions only
    const Frame room = synth_background(17, w, h, 0);

    Pipeline a(cfg);
    for (int i = 0; i < 6; ++i) a.process(room, std::nullopt);
    std::ostringstream saved;
    a.save_model(saved);

    Pipeline b(cfg);
    std::istringstream in(saved.str());
    b.load_model(in);
    CHECK(b.frames_seen() == 6);
    CHECK_FALSE(b.calibrated());

    // Both finish calibration and process the same live frames; the records
    // must be identical.
    SceneSpec spec;
    spec.gesture = SceneGesture::pointing;
    spec.angle_deg = 120.0;
    spec.seed = 5;
    spec.bg_seed = 17;
    spec.width = w;
    spec.height = h;
    const SyntheticScene scene = synth_scene(spec);

    std::vector<std::string> out_a, out_b;
    for (Pipeline* p : {&a, &b}) {
        auto& sink = p == &a ? out_a : out_b;
        for (int i = 6; i < 10; ++i) {
            CHECK_FALSE(p->process(room, std::nullopt).has_value());
        }
        for (int i = 0; i < 2; ++i) {
            const auto r = p->process(scene.frame, scene.truth.face);
            REQUIRE(r.has_value());
            sink.push_back(result_json(*r, false));
        }
    }
    REQUIRE(out_a.size() == out_b.size());
    for (std::size_t i = 0; i < out_a.size(); ++i) CHECK(out_a[i] == out_b[i]);
}

TEST_CASE("saving before any frame is a state error") {
    Pipeline p(small_config(3));
    std::ostringstream out;
    CHECK_THROWS_AS(p.save_model(out), StateError);
}

TEST_CASE("a sudden brightness jump triggers the purge response exactly once") {
    PipelineConfig cfg = small_config(6);
    Pipeline p = calibrated_pipeline(cfg, 13, 64, 48);
    const Frame room = synth_background(13, 64, 48, 0);

    const auto calm = p.process(room, std::nullopt);
    REQUIRE(calm.has_value());
    CHECK(calm->light_action == LightAction::none);

    const Frame bright = shift_brightness(room, 50);
    const auto hit = p.process(bright, std::nullopt);
    REQUIRE(hit.has_value());
    CHECK(hit->light_action == LightAction::purge);

    // The model has absorbed the new level: staying bright is calm again.
    const auto after = p.process(bright, std::nullopt);
    REQUIRE(after.has_value());
    CHECK(after->light_action == LightAction::none);

    const auto soft = p.process(shift_brightness(room, 55), std::nullopt);
    REQUIRE(soft.has_value());
    CHECK(soft->light_action == LightAction::soft);  // +5 on top: under the soft cap
}

TEST_CASE("the kalman variant runs the same pipeline stages") {
    PipelineConfig cfg = small_config(6);
    cfg.variant = BgVariant::kalman;
    Pipeline p = calibrated_pipeline(cfg, 19, 64, 48);
    const auto r = p.process(synth_background(19, 64, 48, 0), std::nullopt);
    REQUIRE(r.has_value());
    CHECK(r->gesture == Gesture::not_pointing);  // no face was ever provided
    CHECK(r->light_action == LightAction::none);  // policy is codebook-only
}
