#pragma once

#include "pfto/adapt.hpp"

#include <functional>
#include <string>

namespace pfto {

struct CompareRow {
    std::string arm;
    int vertices = 0;
    double objective = 0.0; // J on the final mesh
    double lagrangian = 0.0;
    double volume_gap = 0.0;
    double seconds = 0.0;
};

struct CompareResult {
    CompareRow adaptive;
    CompareRow uniform;
    RunReport adaptive_report;
    RunReport uniform_report;
};

[[nodiscard]] CompareRow summarize(const std::string& arm, const RunReport& report);

/// Level callback that also receives the arm name.
using ArmCallback = std::function<void(const std::string& arm, const LevelSnapshot&)>;

/// Runs both arms on the same problem. The uniform arm is forced to Strategy::Uniform;
/// the first arm is named after its own strategy.
[[nodiscard]] CompareResult compare_mode(const ProblemSpec& spec, const AfemConfig& adaptive, AfemConfig uniform,
                                         const ArmCallback& on_level = {});

/// Table with columns arm, vertices, objective, seconds (plus lagrangian and volume gap).
[[nodiscard]] std::string format_table(const CompareResult& result);
[[nodiscard]] std::string table_csv(const CompareResult& result);

} // namespace pfto
