#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lpsnn/scenario.hpp"

namespace lpsnn {

// Bounds and constraints for the parameter-refinement search. The two
// explored parameters are the weight decay rate (stepped up from the
// baseline) and the adaptive-threshold increment, i.e. the threshold term
// (stepped down from the baseline).
struct SearchConfig {
    double step_w = 0.045;
    double w_decay_upper = 0.0;
    double step_vth = 0.1;
    double vth_lower = 0.0;
    double acc_low = 0.20;  // Eq. (1): every task must stay strictly above this
    double acc_loss = 0.0;  // Eq. (2): acceptable drop below baseline_avg
    double baseline_avg = 0.0; // overall average of the non-quantized baseline

    std::vector<std::string> validate(double baseline_w_decay, double baseline_theta_inc) const {
        std::vector<std::string> issues;
        if (!(step_w > 0.0)) issues.push_back("search: step_w must be > 0");
        if (!(step_vth > 0.0)) issues.push_back("search: step_vth must be > 0");
        if (w_decay_upper < baseline_w_decay)
            issues.push_back("search: w_decay_upper is below the baseline w_decay");
        if (w_decay_upper >= 1.0) issues.push_back("search: w_decay_upper must be < 1");
        if (vth_lower > baseline_theta_inc)
            issues.push_back("search: vth_lower is above the baseline threshold term");
        if (vth_lower < 0.0) issues.push_back("search: vth_lower must be >= 0");
        if (!(acc_low > 0.0 && acc_low < 1.0)) issues.push_back("search: acc_low must be in (0, 1)");
        if (acc_loss < 0.0) issues.push_back("search: acc_loss must be >= 0");
        return issues;
    }
};

struct EvaluatedPoint {
    double w_decay = 0.0;
    double threshold_term = 0.0;
    double overall_avg = 0.0;
    double min_task_acc = 0.0;
    bool constraint_pass = false;
};

struct SearchResult {
    SnnModel best_model;
    AccuracyMatrix best_matrix;
    double chosen_w_decay = 0.0;
    double chosen_threshold_term = 0.0;
    bool feasible = false; // false: no feasible point, baseline returned
    std::vector<EvaluatedPoint> evaluated_points;
};

// Eq. (1) and Eq. (2): every final-row task strictly above acc_low, and the
// overall average within acc_loss of the baseline average (non-strict).
inline bool check_constraints(const AccuracyMatrix& m, const SearchConfig& sc) {
    if (m.num_phases() == 0 || !m.complete(m.num_phases())) {
        throw std::invalid_argument("check_constraints: accuracy matrix is incomplete");
    }
    double min_acc = 1.0;
    for (double a : m.final_row()) min_acc = std::min(min_acc, a);
    return min_acc > sc.acc_low && m.overall_avg() >= sc.baseline_avg - sc.acc_loss;
}

// The exploration grid in evaluation order: outer loop widens w_decay from
// the baseline up to the bound, inner loop lowers the threshold term from
// the baseline down to its bound.
inline std::vector<std::pair<double, double>> search_grid(const SearchConfig& sc,
                                                          double baseline_w_decay,
                                                          double baseline_theta_inc) {
    auto issues = sc.validate(baseline_w_decay, baseline_theta_inc);
    if (!issues.empty()) throw ConfigError(std::move(issues));

    constexpr double kTol = 1e-9;
    const int n_w = static_cast<int>(
        std::floor((sc.w_decay_upper - baseline_w_decay) / sc.step_w + kTol)) + 1;
    const int n_q = static_cast<int>(
        std::floor((baseline_theta_inc - sc.vth_lower) / sc.step_vth + kTol)) + 1;

    std::vector<std::pair<double, double>> grid;
    grid.reserve(static_cast<std::size_t>(n_w) * static_cast<std::size_t>(n_q));
    for (int i = 0; i < n_w; ++i) {
        for (int j = 0; j < n_q; ++j) {
            grid.emplace_back(baseline_w_decay + i * sc.step_w,
                              baseline_theta_inc - j * sc.step_vth);
        }
    }
    return grid;
}

namespace detail {

// Tie-break distance: L1 in units of grid steps from the baseline point.
inline double step_distance(const SearchConfig& sc, double w0, double q0, double p, double q) {
    return std::abs(p - w0) / sc.step_w + std::abs(q0 - q) / sc.step_vth;
}

} // namespace detail

// Grid exploration over (w_decay, threshold term). Every point retrains a
// fresh clone of the untrained input model under the identical scenario
// (same stimuli, same seeds), so points differ only in the two parameters.
// Among constraint-passing points the highest overall average wins; ties go
// to the point closest to the baseline parameters, then to the earliest in
// loop order. With no feasible point the baseline-parameter model is
// returned, flagged infeasible.
inline SearchResult refine_parameters(
    const SnnModel& model_in, const Dataset& train, const Dataset& test, const SearchConfig& sc,
    const ScenarioConfig& scenario_cfg,
    const std::function<void(const EvaluatedPoint&)>& on_point = nullptr) {
    const double w0 = model_in.synapses.w_decay;
    const double q0 = model_in.lif.theta_inc;
    const auto grid = search_grid(sc, w0, q0);

    // One runner for all points: the encoded stimulus caches are identical
    // across points by construction.
    ScenarioRunner runner(train, test, scenario_cfg);

    SearchResult result;
    result.evaluated_points.reserve(grid.size());

    SnnModel baseline_model;      // trained model at (w0, q0), the fallback
    AccuracyMatrix baseline_matrix;
    bool have_best = false;
    double best_distance = 0.0;

    for (const auto& [p, q] : grid) {
        SnnModel candidate = model_in;
        candidate.synapses.w_decay = p;
        candidate.lif.theta_inc = q;

        AccuracyMatrix matrix = runner.run_dynamic(candidate);

        EvaluatedPoint point;
        point.w_decay = p;
        point.threshold_term = q;
        point.overall_avg = matrix.overall_avg();
        point.min_task_acc = 1.0;
        for (double a : matrix.final_row()) point.min_task_acc = std::min(point.min_task_acc, a);
        point.constraint_pass = check_constraints(matrix, sc);
        result.evaluated_points.push_back(point);
        if (on_point) on_point(point);

        if (p == w0 && q == q0) {
            baseline_model = candidate;
            baseline_matrix = matrix;
        }

        if (point.constraint_pass) {
            const double distance = detail::step_distance(sc, w0, q0, p, q);
            const bool better =
                !have_best || point.overall_avg > result.best_matrix.overall_avg() ||
                (point.overall_avg == result.best_matrix.overall_avg() && distance < best_distance);
            if (better) {
                result.best_model = std::move(candidate);
                result.best_matrix = std::move(matrix);
                result.chosen_w_decay = p;
                result.chosen_threshold_term = q;
                best_distance = distance;
                have_best = true;
            }
        }
    }

    result.feasible = have_best;
    if (!have_best) {
        result.best_model = std::move(baseline_model);
        result.best_matrix = std::move(baseline_matrix);
        result.chosen_w_decay = w0;
        result.chosen_threshold_term = q0;
    }
    return result;
}

} // namespace lpsnn
