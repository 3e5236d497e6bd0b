#include "pointvec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pointvec/error.hpp"

namespace pv {

double circular_diff_deg(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 360.0);
    if (d > 180.0) d = 360.0 - d;
    return d;
}

namespace {

// Nearest-rank percentile: the q-th quantile of a sorted sample is v[ceil(q*n) - 1].
double nearest_rank(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank < 1) rank = 1;
    if (rank > v.size()) rank = v.size();
    return v[rank - 1];
}

void finish_method(MethodErrors& m) {
    m.median = nearest_rank(m.errors, 0.5);
    m.p90 = nearest_rank(m.errors, 0.9);
}

std::map<int, nlohmann::json> parse_jsonl(const std::string& text, const char* what) {
    std::map<int, nlohmann::json> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("frame") || !j["frame"].is_number_integer()) {
            throw IoError(std::string(what) + " line " + std::to_string(line_no) +
                          ": record needs an integer \"frame\" field");
        }
        const int frame = j["frame"].get<int>();
        if (!out.emplace(frame, std::move(j)).second) {
            throw IoError(std::string(what) + ": duplicate record for frame " +
                          std::to_string(frame));
        }
    }
    return out;
}

double percent(int num, int den) { return den == 0 ? 0.0 : 100.0 * num / den; }

}  // namespace

EvalReport evaluate(const std::string& results_jsonl, const std::string& truth_jsonl) {
    const auto results = parse_jsonl(results_jsonl, "results");
    const auto truths = parse_jsonl(truth_jsonl, "truth");
    if (results.size() != truths.size()) {
        throw InvalidArgument("results cover " + std::to_string(results.size()) +
                              " frames but truth covers " + std::to_string(truths.size()));
    }

    EvalReport report;
    auto rit = results.begin();
    auto tit = truths.begin();
    for (; rit != results.end(); ++rit, ++tit) {
        if (rit->first != tit->first) {
            throw InvalidArgument("results and truth disagree on frame indices (" +
                                  std::to_string(rit->first) + " vs " +
                                  std::to_string(tit->first) + ")");
        }
        const nlohmann::json& res = rit->second;
        const nlohmann::json& tru = tit->second;

        EvalRow row;
        row.frame = rit->first;
        row.truth_pointing = tru.value("pointing", false);
        row.detected = res.value("gesture", "") == "pointing";
        if (row.truth_pointing && tru.contains("angle")) {
            row.truth_angle = tru["angle"].get<double>();
        }

        if (row.truth_pointing && row.detected) {
            report.tp += 1;
        } else if (row.truth_pointing) {
            report.fn += 1;
        } else if (row.detected) {
            report.fp += 1;
        } else {
            report.tn += 1;
        }

        if (row.truth_angle && row.detected && res.contains("angles")) {
            const nlohmann::json& angles = res["angles"];
            const auto record = [&](const char* key, std::optional<double>& slot,
                                    MethodErrors& method) {
                if (!angles.contains(key)) return;
                slot = circular_diff_deg(angles[key].get<double>(), *row.truth_angle);
                method.errors.push_back(*slot);
            };
            record("cog", row.err_cog, report.cog);
            record("next_defect", row.err_next_defect, report.next_defect);
            record("bisector", row.err_bisector, report.bisector);
        }
        report.rows.push_back(std::move(row));
    }

    report.tp_rate = percent(report.tp, report.tp + report.fn);
    report.fn_rate = percent(report.fn, report.tp + report.fn);
    report.tn_rate = percent(report.tn, report.tn + report.fp);
    report.fp_rate = percent(report.fp, report.tn + report.fp);
    finish_method(report.cog);
    finish_method(report.next_defect);
    finish_method(report.bisector);
    return report;
}

std::string eval_text(const EvalReport& r) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(1);
    out << "frames evaluated: " << r.rows.size() << "\n";
    out << "pointing:     TP " << r.tp << " (" << r.tp_rate << "%)  FN " << r.fn << " ("
        << r.fn_rate << "%)\n";
    out << "non-pointing: TN " << r.tn << " (" << r.tn_rate << "%)  FP " << r.fp << " ("
        << r.fp_rate << "%)\n";
    const auto method_line = [&](const char* name, const MethodErrors& m) {
        out << name << ": ";
        if (m.errors.empty()) {
            out << "no samples\n";
            return;
        }
        out << "median " << m.median << " deg, p90 " << m.p90 << " deg over " << m.errors.size()
            << " frames\n";
    };
    out << "angle error by method\n";
    method_line("  cog        ", r.cog);
    method_line("  next_defect", r.next_defect);
    method_line("  bisector   ", r.bisector);
    return out.str();
}

std::string eval_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["frames"] = r.rows.size();
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["tn"] = r.tn;
    j["fn"] = r.fn;
    j["tp_rate"] = r.tp_rate;
    j["fp_rate"] = r.fp_rate;
    j["tn_rate"] = r.tn_rate;
    j["fn_rate"] = r.fn_rate;
    const auto method_obj = [](const MethodErrors& m) {
        nlohmann::ordered_json o;
        o["samples"] = m.errors.size();
        o["median"] = m.median;
        o["p90"] = m.p90;
        return o;
    };
    j["angle_error"] = {{"cog", method_obj(r.cog)},
                        {"next_defect", method_obj(r.next_defect)},
                        {"bisector", method_obj(r.bisector)}};
    return j.dump();
}

}  // namespace pv
