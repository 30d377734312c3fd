#pragma once

#include "pfto/error.hpp"
#include "pfto/fespace.hpp"
#include "pfto/stokes.hpp"

#include <Eigen/SparseCholesky>

#include <chrono>
#include <optional>
#include <vector>

namespace pfto {

/// Augmented-Lagrangian and gradient-flow parameters of the OPTIMIZE step.
struct OptParams {
    double beta = 0.5;     // volume fraction
    double dt = 1.0e-4;    // gradient-flow step
    double s_tilde = 0.25; // stabilization
    int n_outer = 50;
    int n_inner = 10;
    double ell0 = 0.0;
    double zeta0 = 100.0;
    double kappa = 1.1;
    // Treat the zeta W(phi) term by a linearized implicit update instead of explicitly.
    bool implicit_volume = true;
};

void validate(const OptParams& opt);

/// One outer iteration of the optimizer (one CSV row).
struct IterationRecord {
    int level = 0;
    int outer = 0;
    double lagrangian = 0.0;
    ObjectiveTerms terms;
    double volume_gap = 0.0;
    double ell = 0.0;
    double zeta = 0.0;
    std::optional<double> eta1;
    std::optional<double> eta2;
    int vertices = 0;
    double seconds = 0.0;
};

struct OptState {
    double ell = 0.0;
    double zeta = 0.0;
    int multiplier_updates = 0;
    std::vector<IterationRecord> history;

    [[nodiscard]] static OptState initial(const OptParams& opt) { return {opt.ell0, opt.zeta0, 0, {}}; }

    /// ell <- ell + zeta W, zeta <- kappa zeta.
    void update_multipliers(double gap, double kappa)
    {
        ell += zeta * gap;
        zeta *= kappa;
        ++multiplier_updates;
    }
};

/// L = J + ell W + zeta/2 W^2.
[[nodiscard]] inline double augmented_lagrangian(const ObjectiveTerms& terms, double gap, double ell, double zeta)
{
    return terms.total() + ell * gap + 0.5 * zeta * gap * gap;
}

/// P1 dual vector of psi -> int [(gamma/eps) f'(phi) + alpha'(phi)|u|^2/2 + ell + zeta W(phi)] psi.
[[nodiscard]] Eigen::VectorXd sensitivity_source(const Mesh& mesh, const PhaseField& phi, const VelocityField& u,
                                                 const OptState& state, const PhysParams& params, const OptParams& opt);

/// Stabilized semi-implicit L2 gradient flow for the P1 phase field on a fixed mesh.
///
/// Solves (1/dt + S/eps) M (phi+ - phi) + gamma eps K phi+ + zeta m m^T (phi+ - phi) = -source,
/// with m = M 1, then clamps to [0, 1]. When `volume_stiffness` (zeta) is positive the
/// rank-one term is evaluated at the clamped iterate: the scalar s = zeta m^T (phi+ - phi)
/// is found by a bracketed root solve started from the Sherman-Morrison value.
/// The factorization of the mass/stiffness part is computed once per mesh.
class GradientFlow {
public:
    GradientFlow(const Mesh& mesh, const PhysParams& params, const OptParams& opt);

    [[nodiscard]] PhaseField step(const PhaseField& phi, const Eigen::VectorXd& source,
                                  double volume_stiffness = 0.0) const;

    [[nodiscard]] const SparseMatrix& mass() const noexcept { return mass_; }
    [[nodiscard]] const SparseMatrix& stiffness() const noexcept { return stiffness_; }

private:
    SparseMatrix mass_;
    SparseMatrix stiffness_;
    Eigen::VectorXd ones_mass_; // m = M 1
    Eigen::VectorXd solved_ones_mass_;
    double shift_ = 0.0;
    Eigen::SimplicialLDLT<SparseMatrix> factor_;
};

/// Single step without caching; see GradientFlow.
[[nodiscard]] PhaseField gradient_flow_step(const Mesh& mesh, const PhaseField& phi, const Eigen::VectorXd& source,
                                            const OptParams& opt, const PhysParams& params,
                                            double volume_stiffness = 0.0);

struct OptimizeResult {
    PhaseField phi;
    VelocityField u;
    PressureField p;
    OptState state;
};

/// Solver failure inside the optimization loop; carries the history recorded so far.
class OptimizeError : public Error {
public:
    OptimizeError(const Error& cause, OptState partial)
        : Error(cause.kind(), cause.what()), partial_(std::move(partial))
    {
    }
    [[nodiscard]] const OptState& partial_state() const noexcept { return partial_; }

private:
    OptState partial_;
};

struct OptimizeOptions {
    int level = 0;
    LinearSolverKind solver = LinearSolverKind::Direct;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

/// Outer loop: state solve, n_inner gradient-flow steps with u frozen, multiplier update.
/// Appends one history record per outer iteration, each evaluated at a consistent (phi, u) pair.
[[nodiscard]] OptimizeResult optimize_on_mesh(const Mesh& mesh, const PhaseField& phi0, OptState state,
                                              const PhysParams& params, const OptParams& opt,
                                              const BoundaryData& bc, const OptimizeOptions& options = {});

} // namespace pfto
