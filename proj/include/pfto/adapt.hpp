#pragma once

#include "pfto/estimator.hpp"
#include "pfto/mesh.hpp"
#include "pfto/phasefield.hpp"
#include "pfto/problem.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace pfto {

enum class Strategy { Adaptive, Uniform };

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;

struct AfemConfig {
    int levels = 4; // K
    double theta1 = 0.4;
    double theta2 = 0.6;
    Strategy strategy = Strategy::Adaptive;
    int bisections = 3;                   // NVB sweeps applied to each marked element
    std::optional<double> eta_tolerance;  // stop once eta1 and eta2 both fall below it
    LinearSolverKind solver = LinearSolverKind::Direct;
};

void validate(const AfemConfig& cfg);

/// Greedy Doerfler marking: largest indicators first (lower id on ties) until
/// the marked sum reaches theta times the total. All-zero input marks element 0.
[[nodiscard]] MarkedSet doerfler_mark(std::span<const double> indicator_sq, double theta);

/// Union of the Doerfler sets of both estimators.
[[nodiscard]] MarkedSet combined_mark(const Indicators& eta1, const Indicators& eta2, const AfemConfig& cfg);

/// Fraction of `marked` elements with a vertex in the band lo < phi < hi.
[[nodiscard]] double interface_fraction(const Mesh& mesh, const PhaseField& phi, const MarkedSet& marked,
                                        double lo = 0.05, double hi = 0.95);

struct LevelRecord {
    int level = 0;
    int vertices = 0;
    int elements = 0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    ObjectiveTerms terms;
    double lagrangian = 0.0;
    double volume_gap = 0.0;
    double seconds = 0.0; // cumulative
    int marked = 0;       // elements marked for the next level, 0 on the last one
    std::optional<double> interface_fraction;
};

/// Fields and indicators of one finished level.
struct LevelSnapshot {
    const Mesh& mesh;
    const PhaseField& phi;
    const VelocityField& u;
    const PressureField& p;
    const Indicators& eta1;
    const Indicators& eta2;
    const LevelRecord& record;
};

struct RunReport {
    std::vector<LevelRecord> levels;
    OptState state; // history of every outer iteration across levels
    Mesh mesh;
    PhaseField phi;
    VelocityField u;
    PressureField p;
    Indicators eta1;
    Indicators eta2;

    [[nodiscard]] const LevelRecord& final_level() const { return levels.back(); }
};

/// Module failure inside the driver; carries the levels finished so far.
class AfemError : public Error {
public:
    AfemError(const Error& cause, RunReport partial)
        : Error(cause.kind(), cause.what()), partial_(std::move(partial))
    {
    }
    [[nodiscard]] const RunReport& partial_report() const noexcept { return partial_; }

private:
    RunReport partial_;
};

using LevelCallback = std::function<void(const LevelSnapshot&)>;

/// OPTIMIZE, ESTIMATE, MARK, REFINE for K levels.
[[nodiscard]] RunReport afem_drive(const ProblemSpec& spec, const AfemConfig& cfg, const LevelCallback& on_level = {});

} // namespace pfto
