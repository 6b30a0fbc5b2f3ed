#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lpsnn/errors.hpp"
#include "lpsnn/scenario.hpp"
#include "lpsnn/search.hpp"

namespace lpsnn {

// Atomic file write: temp file in the target directory, then rename, so a
// crashed run never leaves a truncated artifact under the final name.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string format_accuracy(double a) {
    std::ostringstream out;
    out.precision(17);
    out << a;
    return out.str();
}

} // namespace detail

// Rows are phases, columns are tasks; cells with task > phase stay empty.
inline std::string accuracy_csv(const AccuracyMatrix& m) {
    std::ostringstream out;
    const int phases = m.num_phases();
    out << "phase";
    for (int k = 0; k < phases; ++k) out << ",task" << k;
    out << ",phase_avg\n";
    const auto avg = m.per_phase_avg();
    for (int i = 0; i < phases; ++i) {
        out << i;
        for (int k = 0; k < phases; ++k) {
            out << ',';
            if (k <= i) out << detail::format_accuracy(m.at(i, k));
        }
        out << ',' << detail::format_accuracy(avg[static_cast<std::size_t>(i)]) << '\n';
    }
    return out.str();
}

inline std::string points_csv(const std::vector<EvaluatedPoint>& points) {
    std::ostringstream out;
    out << "w_decay,threshold_term,overall_avg,min_task_acc,pass\n";
    out.precision(17);
    for (const auto& p : points) {
        out << p.w_decay << ',' << p.threshold_term << ',' << p.overall_avg << ','
            << p.min_task_acc << ',' << (p.constraint_pass ? 1 : 0) << '\n';
    }
    return out.str();
}

inline nlohmann::json memory_report_json(const MemoryReport& r) {
    return {{"synapse_count", r.synapse_count},
            {"bits_per_weight", r.bits_per_weight},
            {"total_bits", r.total_bits},
            {"ratio_vs_32bit", r.ratio_vs_32bit}};
}

inline nlohmann::json accuracy_summary_json(const AccuracyMatrix& m, double acc_low) {
    nlohmann::json low = nlohmann::json::array();
    for (const auto& [phase, task] : low_accuracy_tasks(m, acc_low)) {
        low.push_back({{"phase", phase}, {"task", task}, {"accuracy", m.at(phase, task)}});
    }
    return {{"per_phase_avg", m.per_phase_avg()},
            {"overall_avg", m.overall_avg()},
            {"acc_low", acc_low},
            {"low_accuracy_tasks", low}};
}

} // namespace lpsnn
