#include "pfto/compare.hpp"

#include <cstdio>

namespace pfto {

CompareRow summarize(const std::string& arm, const RunReport& report)
{
    const auto& last = report.final_level();
    return CompareRow{arm, last.vertices, last.terms.total(), last.lagrangian, last.volume_gap, last.seconds};
}

CompareResult compare_mode(const ProblemSpec& spec, const AfemConfig& adaptive, AfemConfig uniform,
                           const ArmCallback& on_level)
{
    uniform.strategy = Strategy::Uniform;
    const auto forward = [&](const std::string& arm) -> LevelCallback {
        if (!on_level) return {};
        return [&on_level, arm](const LevelSnapshot& s) { on_level(arm, s); };
    };
    const std::string first(to_string(adaptive.strategy));
    CompareResult out;
    out.adaptive_report = afem_drive(spec, adaptive, forward(first));
    out.uniform_report = afem_drive(spec, uniform, forward("uniform"));
    out.adaptive = summarize(first, out.adaptive_report);
    out.uniform = summarize("uniform", out.uniform_report);
    return out;
}

std::string format_table(const CompareResult& result)
{
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %10s %12s %12s %12s %10s\n", "arm", "vertices", "objective", "lagrangian",
                  "volume_gap", "seconds");
    out += line;
    for (const auto* row : {&result.adaptive, &result.uniform}) {
        std::snprintf(line, sizeof line, "%-10s %10d %12.4f %12.4f %12.3e %10.1f\n", row->arm.c_str(), row->vertices,
                      row->objective, row->lagrangian, row->volume_gap, row->seconds);
        out += line;
    }
    return out;
}

std::string table_csv(const CompareResult& result)
{
    std::string out = "arm,vertices,objective,lagrangian,volume_gap,seconds\n";
    char line[200];
    for (const auto* row : {&result.adaptive, &result.uniform}) {
        std::snprintf(line, sizeof line, "%s,%d,%.17g,%.17g,%.17g,%.3f\n", row->arm.c_str(), row->vertices,
                      row->objective, row->lagrangian, row->volume_gap, row->seconds);
        out += line;
    }
    return out;
}

} // namespace pfto
