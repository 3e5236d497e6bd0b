#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pointvec.h"

namespace {

struct FrameDeleter {
    void operator()(pv_frame* f) const { pv_frame_free(f); }
};
struct SourceDeleter {
    void operator()(pv_source* s) const { pv_source_free(s); }
};
struct FacesDeleter {
    void operator()(pv_faces* f) const { pv_faces_free(f); }
};
struct PipelineDeleter {
    void operator()(pv_pipeline* p) const { pv_pipeline_free(p); }
};
struct ResultDeleter {
    void operator()(pv_result* r) const { pv_result_free(r); }
};
using FramePtr = std::unique_ptr<pv_frame, FrameDeleter>;
using SourcePtr = std::unique_ptr<pv_source, SourceDeleter>;
using FacesPtr = std::unique_ptr<pv_faces, FacesDeleter>;
using PipelinePtr = std::unique_ptr<pv_pipeline, PipelineDeleter>;
using ResultPtr = std::unique_ptr<pv_result, ResultDeleter>;

int fail(pv_status st) {
    std::cerr << "error: " << pv_last_error() << "\n";
    switch (st) {
        case PV_ERR_BAD_CONFIG:
            return 2;
        case PV_ERR_IO:
        case PV_ERR_INVALID_ARGUMENT:
        case PV_ERR_DIMENSION_MISMATCH:
            return 3;
        default:
            return 1;
    }
}

int fail_input(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 3;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<std::string> out;
    if (rc == 0) out.assign(g.gl_pathv, g.gl_pathv + g.gl_pathc);
    ::globfree(&g);
    return out;  // glob sorts; any failure shows up as "no frames match"
}

// "frames/000031.ppm" -> "000031"
std::string stem_of(const std::string& path) {
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name.erase(0, slash + 1);
    if (name.size() > 4 && name.compare(name.size() - 4, 4, ".ppm") == 0) {
        name.erase(name.size() - 4);
    }
    return name;
}

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06d", index);
    return buf;
}

double nearest_rank(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    if (rank < 1) rank = 1;
    if (rank > v.size()) rank = v.size();
    return v[rank - 1];
}

// ---- run ----------------------------------------------------------------------

struct RunOpts {
    std::string config;
    std::string frames;
    std::string faces;
    std::string out;
    std::string annotate_dir;
    std::string save_model;
    std::string load_model;
    std::string dump_hist;
    bool timing = false;
};

int cmd_run(const RunOpts& o) {
    pv_pipeline* pipe_raw = nullptr;
    pv_status st = pv_pipeline_create_from_file(o.config.c_str(), &pipe_raw);
    if (st != PV_OK) return fail(st);
    PipelinePtr pipe(pipe_raw);

    int index = 0;
    if (!o.load_model.empty()) {
        st = pv_pipeline_load_model(pipe.get(), o.load_model.c_str());
        if (st != PV_OK) return fail(st);
        index = pv_pipeline_frames_seen(pipe.get());  // keep sidecar lookups aligned
    }

    FacesPtr faces;
    if (!o.faces.empty()) {
        pv_faces* f = nullptr;
        st = pv_faces_load(o.faces.c_str(), &f);
        if (st != PV_OK) return fail(st);
        faces.reset(f);
    }

    std::ofstream out_file;
    std::ostream* out = &std::cout;
    if (o.out != "-") {
        out_file.open(o.out, std::ios::binary);
        if (!out_file) return fail_input("cannot write " + o.out);
        out = &out_file;
    }

    if (!o.annotate_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(o.annotate_dir, ec);
        if (ec) return fail_input("cannot create " + o.annotate_dir + ": " + ec.message());
    }

    // Returns -1 to continue, otherwise the process exit code.
    const auto handle = [&](FramePtr frame, const std::string& stem) -> int {
        const int* face = nullptr;
        int rect[4];
        if (faces) {
            int found = 0;
            pv_faces_lookup(faces.get(), index, rect, &found);
            if (found) face = rect;
        }
        pv_result* res_raw = nullptr;
        pv_status pst = pv_pipeline_process(pipe.get(), frame.get(), face, &res_raw);
        if (pst != PV_OK) return fail(pst);
        if (res_raw != nullptr) {
            ResultPtr res(res_raw);
            char* line = nullptr;
            pst = pv_result_json(res.get(), o.timing ? 1 : 0, &line);
            if (pst != PV_OK) return fail(pst);
            (*out) << line << "\n";
            pv_string_free(line);
            if (!o.annotate_dir.empty()) {
                pv_frame* painted_raw = nullptr;
                pst = pv_result_annotate(res.get(), frame.get(), &painted_raw);
                if (pst != PV_OK) return fail(pst);
                FramePtr painted(painted_raw);
                const std::string path = o.annotate_dir + "/" + stem + ".annot.ppm";
                pst = pv_frame_write_ppm(painted.get(), path.c_str());
                if (pst != PV_OK) return fail(pst);
            }
        }
        ++index;
        return -1;
    };

    if (o.frames == "-") {
        pv_source* src_raw = nullptr;
        st = pv_source_open_stdin(&src_raw);
        if (st != PV_OK) return fail(st);
        SourcePtr src(src_raw);
        while (true) {
            pv_frame* frame = nullptr;
            st = pv_source_next(src.get(), &frame);
            if (st != PV_OK) return fail(st);
            if (frame == nullptr) break;
            const int rc = handle(FramePtr(frame), frame_name(index));
            if (rc >= 0) return rc;
        }
    } else {
        const std::vector<std::string> paths = expand_glob(o.frames);
        if (paths.empty()) return fail_input("no frames match " + o.frames);
        for (const std::string& path : paths) {
            pv_frame* frame = nullptr;
            st = pv_frame_read_ppm(path.c_str(), &frame);
            if (st != PV_OK) return fail(st);
            const int rc = handle(FramePtr(frame), stem_of(path));
            if (rc >= 0) return rc;
        }
    }

    if (!o.save_model.empty()) {
        st = pv_pipeline_save_model(pipe.get(), o.save_model.c_str());
        if (st != PV_OK) return fail(st);
    }
    if (!o.dump_hist.empty()) {
        char* text = nullptr;
        st = pv_pipeline_skin_histogram_text(pipe.get(), &text);
        if (st != PV_OK) return fail(st);
        std::ofstream hist(o.dump_hist, std::ios::binary);
        hist << text;
        pv_string_free(text);
        if (!hist) return fail_input("cannot write " + o.dump_hist);
    }
    out->flush();
    if (out == &out_file && !out_file) return fail_input("short write to " + o.out);
    return 0;
}

// ---- synth --------------------------------------------------------------------

struct SynthOpts {
    std::string gesture = "pointing";
    double angle = 45.0;
    double angle_step = 0.0;
    int count = 1;
    std::uint64_t seed = 1;
    std::uint64_t bg_seed = 1;
    int calibration = 30;
    int width = 640;
    int height = 480;
    std::vector<int> ramp;
    std::string out_dir;
};

int cmd_synth(const SynthOpts& o) {
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) return fail_input("cannot create " + o.out_dir + ": " + ec.message());

    std::ofstream faces(o.out_dir + "/faces.txt", std::ios::binary);
    std::ofstream truth(o.out_dir + "/truth.jsonl", std::ios::binary);
    if (!faces || !truth) return fail_input("cannot write sidecars in " + o.out_dir);

    const auto write_frame = [&](const pv_frame* f, int index) -> int {
        const std::string path = o.out_dir + "/" + frame_name(index) + ".ppm";
        const pv_status st = pv_frame_write_ppm(f, path.c_str());
        return st == PV_OK ? -1 : fail(st);
    };

    int index = 0;
    for (int i = 0; i < o.calibration; ++i) {
        pv_frame* bg_raw = nullptr;
        const pv_status st = pv_synth_background(o.bg_seed, o.width, o.height, 0, &bg_raw);
        if (st != PV_OK) return fail(st);
        FramePtr bg(bg_raw);
        const int rc = write_frame(bg.get(), index);
        if (rc >= 0) return rc;
        ++index;
    }

    const std::vector<int> offsets = o.ramp.empty() ? std::vector<int>{0} : o.ramp;
    static const char* kCycle[] = {"pointing", "palm", "fist"};
    for (int i = 0; i < o.count; ++i) {
        const char* gesture =
            o.gesture == "mixed" ? kCycle[i % 3] : o.gesture.c_str();
        double angle = std::fmod(o.angle + i * o.angle_step, 360.0);
        if (angle < 0) angle += 360.0;
        bool first = true;
        for (const int delta : offsets) {
            pv_frame* frame_raw = nullptr;
            char* truth_json = nullptr;
            int face[4];
            const pv_status st =
                pv_synth_scene(gesture, angle, o.seed + static_cast<std::uint64_t>(i), o.bg_seed,
                               o.width, o.height, delta, index, &frame_raw, face, &truth_json);
            if (st != PV_OK) return fail(st);
            FramePtr frame(frame_raw);
            truth << truth_json << "\n";
            pv_string_free(truth_json);
            if (first) {
                faces << index << " " << face[0] << " " << face[1] << " " << face[2] << " "
                      << face[3] << "\n";
                first = false;
            }
            const int rc = write_frame(frame.get(), index);
            if (rc >= 0) return rc;
            ++index;
        }
    }

    faces.flush();
    truth.flush();
    if (!faces || !truth) return fail_input("short write in " + o.out_dir);
    std::cout << "wrote " << index << " frames to " << o.out_dir << "\n";
    return 0;
}

// ---- eval ---------------------------------------------------------------------

struct EvalOpts {
    std::string results;
    std::string truth;
    bool json = false;
};

int cmd_eval(const EvalOpts& o) {
    char* text = nullptr;
    char* json = nullptr;
    const pv_status st =
        pv_evaluate_files(o.results.c_str(), o.truth.c_str(), &text, o.json ? &json : nullptr);
    if (st != PV_OK) return fail(st);
    if (o.json) {
        std::cout << json << "\n";
        pv_string_free(json);
    } else {
        std::cout << text;
    }
    pv_string_free(text);
    return 0;
}

// ---- bench --------------------------------------------------------------------

struct BenchOpts {
    std::string frames;
    std::string config;
    std::string faces;
};

int cmd_bench(const BenchOpts& o) {
    pv_pipeline* pipe_raw = nullptr;
    pv_status st = o.config.empty() ? pv_pipeline_create("", &pipe_raw)
                                    : pv_pipeline_create_from_file(o.config.c_str(), &pipe_raw);
    if (st != PV_OK) return fail(st);
    PipelinePtr pipe(pipe_raw);

    FacesPtr faces;
    if (!o.faces.empty()) {
        pv_faces* f = nullptr;
        st = pv_faces_load(o.faces.c_str(), &f);
        if (st != PV_OK) return fail(st);
        faces.reset(f);
    }

    const std::vector<std::string> paths = expand_glob(o.frames);
    if (paths.empty()) return fail_input("no frames match " + o.frames);

    std::map<std::string, std::vector<double>> stages;
    std::vector<std::string> stage_order;
    int processed = 0;
    int index = 0;
    for (const std::string& path : paths) {
        pv_frame* frame_raw = nullptr;
        st = pv_frame_read_ppm(path.c_str(), &frame_raw);
        if (st != PV_OK) return fail(st);
        FramePtr frame(frame_raw);

        const int* face = nullptr;
        int rect[4];
        if (faces) {
            int found = 0;
            pv_faces_lookup(faces.get(), index, rect, &found);
            if (found) face = rect;
        }
        pv_result* res_raw = nullptr;
        st = pv_pipeline_process(pipe.get(), frame.get(), face, &res_raw);
        if (st != PV_OK) return fail(st);
        ++index;
        if (res_raw == nullptr) continue;
        ResultPtr res(res_raw);
        ++processed;
        const int n = pv_result_stage_count(res.get());
        for (int i = 0; i < n; ++i) {
            const char* name = nullptr;
            double ms = 0.0;
            pv_result_stage(res.get(), i, &name, &ms);
            if (stages.find(name) == stages.end()) stage_order.emplace_back(name);
            stages[name].push_back(ms);
        }
    }

    std::cout << "frames: " << paths.size() << " (" << processed << " past calibration)\n";
    if (processed == 0) return 0;
    std::cout.setf(std::ios::fixed);
    std::cout.precision(2);
    for (const std::string& name : stage_order) {
        const std::vector<double>& v = stages[name];
        std::cout << "  " << name << ": median " << nearest_rank(v, 0.5) << " ms, p90 "
                  << nearest_rank(v, 0.9) << " ms, max " << *std::max_element(v.begin(), v.end())
                  << " ms\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hand-pointing detection pipeline"};
    app.require_subcommand(1);

    RunOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "process a frame sequence to JSON lines");
    run->add_option("--config", run_opts.config, "pipeline config file (key = value lines)")
        ->required();
    run->add_option("--frames", run_opts.frames,
                    "glob of PPM frames, or '-' for a concatenated-PPM stream on stdin")
        ->required();
    run->add_option("--faces", run_opts.faces, "face-rectangle sidecar file");
    run->add_option("--out", run_opts.out, "output JSONL path, or '-' for stdout")->required();
    run->add_option("--annotate", run_opts.annotate_dir,
                    "directory for annotated copies of processed frames");
    run->add_flag("--timing", run_opts.timing, "include per-stage milliseconds in each record");
    run->add_option("--save-model", run_opts.save_model,
                    "write the background model here after the run");
    run->add_option("--load-model", run_opts.load_model,
                    "start from a previously saved background model");
    run->add_option("--dump-skin-hist", run_opts.dump_hist,
                    "write the final skin histogram as text");

    SynthOpts synth_opts;
    CLI::App* synth = app.add_subcommand("synth", "generate synthetic scenes with ground truth");
    synth->add_option("--gesture", synth_opts.gesture, "pointing, palm, fist, or mixed")
        ->check(CLI::IsMember({"pointing", "palm", "fist", "mixed"}));
    synth->add_option("--angle", synth_opts.angle, "pointing angle in degrees (ccw, y up)");
    synth->add_option("--angle-step", synth_opts.angle_step, "angle increment between scenes");
    synth->add_option("--count", synth_opts.count, "number of scenes")
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_opts.seed, "pose seed for the first scene (increments)");
    synth->add_option("--bg-seed", synth_opts.bg_seed, "background texture seed");
    synth->add_option("--calibration", synth_opts.calibration,
                      "background-only frames emitted before the scenes")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--width", synth_opts.width, "frame width")->check(CLI::PositiveNumber);
    synth->add_option("--height", synth_opts.height, "frame height")->check(CLI::PositiveNumber);
    synth->add_option("--ramp", synth_opts.ramp,
                      "brightness offsets; each scene is replayed once per offset")
        ->delimiter(',');
    synth->add_option("--out", synth_opts.out_dir, "output directory")->required();

    EvalOpts eval_opts;
    CLI::App* eval = app.add_subcommand("eval", "score detector output against ground truth");
    eval->add_option("--results", eval_opts.results, "detector JSONL")->required();
    eval->add_option("--truth", eval_opts.truth, "ground-truth JSONL")->required();
    eval->add_flag("--json", eval_opts.json, "print a JSON summary instead of the table");

    BenchOpts bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "report per-stage timings over a sequence");
    bench->add_option("--frames", bench_opts.frames, "glob of PPM frames")->required();
    bench->add_option("--config", bench_opts.config, "pipeline config file (defaults if absent)");
    bench->add_option("--faces", bench_opts.faces, "face-rectangle sidecar file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return cmd_run(run_opts);
    if (synth->parsed()) return cmd_synth(synth_opts);
    if (eval->parsed()) return cmd_eval(eval_opts);
    if (bench->parsed()) return cmd_bench(bench_opts);
    return 2;
}
