#include "pointvec.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pointvec/annotate.hpp"
#include "pointvec/config.hpp"
#include "pointvec/error.hpp"
#include "pointvec/eval.hpp"
#include "pointvec/pipeline.hpp"
#include "pointvec/ppm.hpp"
#include "pointvec/synth.hpp"

struct pv_frame {
    pv::Frame f;
};

struct pv_source {
    std::ifstream file;
    std::istream* in = nullptr;  // &file, or std::cin for the stdin source
};

struct pv_faces {
    pv::FaceTrack track;
};

struct pv_pipeline {
    explicit pv_pipeline(const pv::PipelineConfig& cfg) : p(cfg) {}
    pv::Pipeline p;
};

struct pv_result {
    pv::FrameResult r;
    std::string gesture;
    std::vector<std::pair<std::string, double>> stages;
};

namespace {

thread_local std::string g_error;

template <typename Fn>
pv_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const pv::DimensionMismatch& e) {
        g_error = e.what();
        return PV_ERR_DIMENSION_MISMATCH;
    } catch (const pv::InvalidArgument& e) {
        g_error = e.what();
        return PV_ERR_INVALID_ARGUMENT;
    } catch (const pv::ConfigError& e) {
        g_error = e.what();
        return PV_ERR_BAD_CONFIG;
    } catch (const pv::IoError& e) {
        g_error = e.what();
        return PV_ERR_IO;
    } catch (const pv::StateError& e) {
        g_error = e.what();
        return PV_ERR_BAD_STATE;
    } catch (const std::exception& e) {
        g_error = e.what();
        return PV_ERR_INTERNAL;
    }
}

pv_status fail_invalid(const char* msg) {
    g_error = msg;
    return PV_ERR_INVALID_ARGUMENT;
}

pv_status dup_string(const std::string& s, char** out) {
    char* copy = static_cast<char*>(std::malloc(s.size() + 1));
    if (copy == nullptr) {
        g_error = "out of memory";
        return PV_ERR_INTERNAL;
    }
    std::memcpy(copy, s.c_str(), s.size() + 1);
    *out = copy;
    return PV_OK;
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pv::IoError(std::string("cannot read ") + what + ": " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

pv_result* wrap_result(pv::FrameResult&& fr) {
    auto* r = new pv_result;
    r->r = std::move(fr);
    r->gesture = pv::to_string(r->r.gesture);
    for (const char* key :
         {"subtract", "skin", "components", "classify", "light_change", "total"}) {
        const auto it = r->r.ms.find(key);
        if (it != r->r.ms.end()) r->stages.emplace_back(key, it->second);
    }
    return r;
}

std::optional<pv::Rect> rect_from(const int face[4]) {
    if (face == nullptr) return std::nullopt;
    return pv::Rect{face[0], face[1], face[2], face[3]};
}

}  // namespace

extern "C" {

const char* pv_version(void) { return "1.0.0"; }

const char* pv_last_error(void) { return g_error.c_str(); }

void pv_string_free(char* s) { std::free(s); }

/* ---- frames --------------------------------------------------------------- */

pv_status pv_frame_create(int width, int height, pv_frame** out) {
    if (out == nullptr) return fail_invalid("out is NULL");
    return guarded([&] {
        *out = new pv_frame{pv::Frame(width, height)};
        return PV_OK;
    });
}

void pv_frame_free(pv_frame* f) { delete f; }

int pv_frame_width(const pv_frame* f) { return f == nullptr ? 0 : f->f.width; }

int pv_frame_height(const pv_frame* f) { return f == nullptr ? 0 : f->f.height; }

pv_status pv_frame_get_pixel(const pv_frame* f, int x, int y, unsigned char rgb[3]) {
    if (f == nullptr || rgb == nullptr) return fail_invalid("frame or rgb is NULL");
    if (!f->f.in_bounds(x, y)) return fail_invalid("pixel out of bounds");
    const pv::Rgb c = f->f.at(x, y);
    rgb[0] = c.r;
    rgb[1] = c.g;
    rgb[2] = c.b;
    return PV_OK;
}

pv_status pv_frame_set_pixel(pv_frame* f, int x, int y, const unsigned char rgb[3]) {
    if (f == nullptr || rgb == nullptr) return fail_invalid("frame or rgb is NULL");
    if (!f->f.in_bounds(x, y)) return fail_invalid("pixel out of bounds");
    f->f.set(x, y, {rgb[0], rgb[1], rgb[2]});
    return PV_OK;
}

pv_status pv_frame_read_ppm(const char* path, pv_frame** out) {
    if (path == nullptr || out == nullptr) return fail_invalid("path or out is NULL");
    return guarded([&] {
        *out = new pv_frame{pv::read_ppm(path)};
        return PV_OK;
    });
}

pv_status pv_frame_write_ppm(const pv_frame* f, const char* path) {
    if (f == nullptr || path == nullptr) return fail_invalid("frame or path is NULL");
    return guarded([&] {
        pv::write_ppm(f->f, path);
        return PV_OK;
    });
}

pv_status pv_frame_shift_brightness(const pv_frame* f, int delta, pv_frame** out) {
    if (f == nullptr || out == nullptr) return fail_invalid("frame or out is NULL");
    return guarded([&] {
        *out = new pv_frame{pv::shift_brightness(f->f, delta)};
        return PV_OK;
    });
}

/* ---- frame sources ---------------------------------------------------------- */

pv_status pv_source_open_stdin(pv_source** out) {
    if (out == nullptr) return fail_invalid("out is NULL");
    auto* s = new pv_source;
    s->in = &std::cin;
    *out = s;
    return PV_OK;
}

pv_status pv_source_open_file(const char* path, pv_source** out) {
    if (path == nullptr || out == nullptr) return fail_invalid("path or out is NULL");
    auto s = std::make_unique<pv_source>();
    s->file.open(path, std::ios::binary);
    if (!s->file) {
        g_error = std::string("cannot open frame stream: ") + path;
        return PV_ERR_IO;
    }
    s->in = &s->file;
    *out = s.release();
    return PV_OK;
}

pv_status pv_source_next(pv_source* s, pv_frame** out) {
    if (s == nullptr || out == nullptr) return fail_invalid("source or out is NULL");
    return guarded([&] {
        std::optional<pv::Frame> f = pv::read_ppm_stream(*s->in);
        *out = f ? new pv_frame{std::move(*f)} : nullptr;
        return PV_OK;
    });
}

void pv_source_free(pv_source* s) { delete s; }

/* ---- face sidecar ------------------------------------------------------------ */

pv_status pv_faces_load(const char* path, pv_faces** out) {
    if (path == nullptr || out == nullptr) return fail_invalid("path or out is NULL");
    return guarded([&] {
        *out = new pv_faces{pv::FaceTrack::load(path)};
        return PV_OK;
    });
}

pv_status pv_faces_parse(const char* text, pv_faces** out) {
    if (text == nullptr || out == nullptr) return fail_invalid("text or out is NULL");
    return guarded([&] {
        *out = new pv_faces{pv::FaceTrack::parse(text)};
        return PV_OK;
    });
}

pv_status pv_faces_lookup(const pv_faces* f, int frame_index, int rect_out[4], int* found) {
    if (f == nullptr || rect_out == nullptr || found == nullptr) {
        return fail_invalid("faces, rect_out, or found is NULL");
    }
    const std::optional<pv::Rect> r = f->track.lookup(frame_index);
    *found = r.has_value() ? 1 : 0;
    if (r) {
        rect_out[0] = r->x;
        rect_out[1] = r->y;
        rect_out[2] = r->w;
        rect_out[3] = r->h;
    }
    return PV_OK;
}

void pv_faces_free(pv_faces* f) { delete f; }

/* ---- pipeline ---------------------------------------------------------------- */

pv_status pv_pipeline_create(const char* config_text, pv_pipeline** out) {
    if (config_text == nullptr || out == nullptr) return fail_invalid("config or out is NULL");
    return guarded([&] {
        *out = new pv_pipeline(pv::parse_config(config_text));
        return PV_OK;
    });
}

pv_status pv_pipeline_create_from_file(const char* config_path, pv_pipeline** out) {
    if (config_path == nullptr || out == nullptr) return fail_invalid("path or out is NULL");
    return guarded([&] {
        *out = new pv_pipeline(pv::load_config(config_path));
        return PV_OK;
    });
}

void pv_pipeline_free(pv_pipeline* p) { delete p; }

pv_status pv_pipeline_process(pv_pipeline* p, const pv_frame* f, const int face[4],
                              pv_result** out) {
    if (p == nullptr || f == nullptr || out == nullptr) {
        return fail_invalid("pipeline, frame, or out is NULL");
    }
    return guarded([&] {
        std::optional<pv::FrameResult> r = p->p.process(f->f, rect_from(face));
        *out = r ? wrap_result(std::move(*r)) : nullptr;
        return PV_OK;
    });
}

pv_status pv_pipeline_save_model(const pv_pipeline* p, const char* path) {
    if (p == nullptr || path == nullptr) return fail_invalid("pipeline or path is NULL");
    return guarded([&] {
        std::ofstream outfile(path, std::ios::binary);
        if (!outfile) throw pv::IoError(std::string("cannot write model: ") + path);
        p->p.save_model(outfile);
        outfile.flush();
        if (!outfile) throw pv::IoError(std::string("short write: ") + path);
        return PV_OK;
    });
}

pv_status pv_pipeline_load_model(pv_pipeline* p, const char* path) {
    if (p == nullptr || path == nullptr) return fail_invalid("pipeline or path is NULL");
    return guarded([&] {
        std::ifstream infile(path, std::ios::binary);
        if (!infile) throw pv::IoError(std::string("cannot read model: ") + path);
        p->p.load_model(infile);
        return PV_OK;
    });
}

int pv_pipeline_frames_seen(const pv_pipeline* p) { return p == nullptr ? 0 : p->p.frames_seen(); }

pv_status pv_pipeline_skin_histogram_text(const pv_pipeline* p, char** out) {
    if (p == nullptr || out == nullptr) return fail_invalid("pipeline or out is NULL");
    return guarded([&] { return dup_string(p->p.skin_histogram_text(), out); });
}

/* ---- results ------------------------------------------------------------------ */

void pv_result_free(pv_result* r) { delete r; }

pv_status pv_result_json(const pv_result* r, int include_timing, char** out) {
    if (r == nullptr || out == nullptr) return fail_invalid("result or out is NULL");
    return guarded([&] { return dup_string(pv::result_json(r->r, include_timing != 0), out); });
}

int pv_result_frame_index(const pv_result* r) { return r == nullptr ? -1 : r->r.frame; }

pv_status pv_result_gesture(const pv_result* r, const char** out) {
    if (r == nullptr || out == nullptr) return fail_invalid("result or out is NULL");
    *out = r->gesture.c_str();
    return PV_OK;
}

pv_status pv_result_light_action(const pv_result* r, const char** out) {
    if (r == nullptr || out == nullptr) return fail_invalid("result or out is NULL");
    switch (r->r.light_action) {
        case pv::LightAction::soft:
            *out = "soft";
            break;
        case pv::LightAction::purge:
            *out = "purge";
            break;
        default:
            *out = "none";
            break;
    }
    return PV_OK;
}

int pv_result_stage_count(const pv_result* r) {
    return r == nullptr ? 0 : static_cast<int>(r->stages.size());
}

pv_status pv_result_stage(const pv_result* r, int index, const char** name_out, double* ms_out) {
    if (r == nullptr || name_out == nullptr || ms_out == nullptr) {
        return fail_invalid("result, name_out, or ms_out is NULL");
    }
    if (index < 0 || index >= static_cast<int>(r->stages.size())) {
        return fail_invalid("stage index out of range");
    }
    *name_out = r->stages[index].first.c_str();
    *ms_out = r->stages[index].second;
    return PV_OK;
}

pv_status pv_result_annotate(const pv_result* r, const pv_frame* src, pv_frame** out) {
    if (r == nullptr || src == nullptr || out == nullptr) {
        return fail_invalid("result, src, or out is NULL");
    }
    return guarded([&] {
        *out = new pv_frame{pv::annotate(src->f, r->r)};
        return PV_OK;
    });
}

/* ---- synthetic scenes ----------------------------------------------------------- */

pv_status pv_synth_background(uint64_t bg_seed, int width, int height, int brightness,
                              pv_frame** out) {
    if (out == nullptr) return fail_invalid("out is NULL");
    return guarded([&] {
        *out = new pv_frame{pv::synth_background(bg_seed, width, height, brightness)};
        return PV_OK;
    });
}

pv_status pv_synth_scene(const char* gesture, double angle_deg, uint64_t seed, uint64_t bg_seed,
                         int width, int height, int brightness, int frame_index,
                         pv_frame** frame_out, int face_out[4], char** truth_json_out) {
    if (gesture == nullptr || frame_out == nullptr || face_out == nullptr ||
        truth_json_out == nullptr) {
        return fail_invalid("gesture or an output pointer is NULL");
    }
    return guarded([&]() -> pv_status {
        pv::SceneSpec spec;
        const std::string g = gesture;
        if (g == "pointing") {
            spec.gesture = pv::SceneGesture::pointing;
        } else if (g == "palm") {
            spec.gesture = pv::SceneGesture::palm;
        } else if (g == "fist") {
            spec.gesture = pv::SceneGesture::fist;
        } else {
            throw pv::InvalidArgument("gesture must be pointing, palm, or fist");
        }
        spec.angle_deg = angle_deg;
        spec.seed = seed;
        spec.bg_seed = bg_seed;
        spec.width = width;
        spec.height = height;
        spec.brightness = brightness;

        pv::SyntheticScene scene = pv::synth_scene(spec);
        nlohmann::ordered_json t;
        t["frame"] = frame_index;
        t["pointing"] = scene.truth.pointing;
        if (scene.truth.pointing) {
            t["angle"] = scene.truth.angle_deg;
            t["fingertip"] = {scene.truth.fingertip.x, scene.truth.fingertip.y};
        }
        char* json = nullptr;
        const pv_status st = dup_string(t.dump(), &json);
        if (st != PV_OK) return st;

        face_out[0] = scene.truth.face.x;
        face_out[1] = scene.truth.face.y;
        face_out[2] = scene.truth.face.w;
        face_out[3] = scene.truth.face.h;
        *frame_out = new pv_frame{std::move(scene.frame)};
        *truth_json_out = json;
        return PV_OK;
    });
}

/* ---- evaluation ------------------------------------------------------------------ */

pv_status pv_evaluate_files(const char* results_path, const char* truth_path, char** text_out,
                            char** json_out) {
    if (results_path == nullptr || truth_path == nullptr) {
        return fail_invalid("results_path or truth_path is NULL");
    }
    return guarded([&]() -> pv_status {
        const pv::EvalReport report = pv::evaluate(read_file(results_path, "results"),
                                                   read_file(truth_path, "truth"));
        char* text = nullptr;
        if (text_out != nullptr) {
            const pv_status st = dup_string(pv::eval_text(report), &text);
            if (st != PV_OK) return st;
        }
        if (json_out != nullptr) {
            char* json = nullptr;
            const pv_status st = dup_string(pv::eval_json(report), &json);
            if (st != PV_OK) {
                std::free(text);
                return st;
            }
            *json_out = json;
        }
        if (text_out != nullptr) *text_out = text;
        return PV_OK;
    });
}

}  // extern "C"
