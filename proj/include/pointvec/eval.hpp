#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pv {

// Smallest absolute difference between two angles in degrees, in [0, 180].
double circular_diff_deg(double a, double b);

struct EvalRow {
    int frame = 0;
    bool truth_pointing = false;
    bool detected = false;
    std::optional<double> truth_angle;
    std::optional<double> err_cog;
    std::optional<double> err_next_defect;
    std::optional<double> err_bisector;
};

struct MethodErrors {
    std::vector<double> errors;  // one per frame where truth and detection were both pointing
    double median = 0.0;
    double p90 = 0.0;
};

struct EvalReport {
    int tp = 0;
    int fp = 0;
    int tn = 0;
    int fn = 0;
    double tp_rate = 0.0;  // percent of truth-pointing frames detected
    double tn_rate = 0.0;  // percent of truth-non-pointing frames rejected
    double fp_rate = 0.0;
    double fn_rate = 0.0;
    MethodErrors cog;
    MethodErrors next_defect;
    MethodErrors bisector;
    std::vector<EvalRow> rows;
};

// Both arguments are JSON-lines text: per-frame detector records and the matching
// ground-truth records. The two streams must cover exactly the same frame indices.
EvalReport evaluate(const std::string& results_jsonl, const std::string& truth_jsonl);

std::string eval_text(const EvalReport& report);
std::string eval_json(const EvalReport& report);

}  // namespace pv
