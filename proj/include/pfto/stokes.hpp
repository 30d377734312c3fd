#pragma once

#include "pfto/fespace.hpp"
#include "pfto/mesh.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace pfto {

/// Physical and regularization parameters of the Brinkman-Stokes phase-field problem.
struct PhysParams {
    double mu = 1.0;
    double alpha_max = 1.0e4; // alpha(phi) = alpha_max (1 - phi)^2
    double epsilon = 1.0e-2;
    double gamma = 1.0e-2;
    VectorFunction body_force; // empty means f = 0

    [[nodiscard]] double alpha(double phi) const noexcept { return alpha_max * (1.0 - phi) * (1.0 - phi); }
    [[nodiscard]] double alpha_prime(double phi) const noexcept { return -2.0 * alpha_max * (1.0 - phi); }
    [[nodiscard]] Vec2 force(const Vec2& x) const { return body_force ? body_force(x) : Vec2::Zero(); }
};

/// Double-well potential f(phi) = phi^2 (1 - phi)^2 / 4 and its derivative.
[[nodiscard]] inline double double_well(double phi) noexcept
{
    return 0.25 * phi * phi * (1.0 - phi) * (1.0 - phi);
}
[[nodiscard]] inline double double_well_prime(double phi) noexcept
{
    return 0.5 * phi * (1.0 - phi) * (1.0 - 2.0 * phi);
}

void validate(const PhysParams& params);

/// Dirichlet data: `inlet` on inlet edges, zero on walls; outlets are traction free.
struct BoundaryData {
    VectorFunction inlet;

    [[nodiscard]] Vec2 value(BoundaryTag tag, const Vec2& x) const
    {
        return (tag == BoundaryTag::Inlet && inlet) ? inlet(x) : Vec2::Zero();
    }
};

enum class GaugeMode { Auto, Off };
enum class LinearSolverKind { Direct, SparseLU, Minres };

/// CR-P0 saddle-point system before constraint elimination.
struct SaddleSystem {
    SparseMatrix velocity_block; // 2E x 2E, component-blocked
    SparseMatrix div_block;      // T x 2E, rows -(div v, 1_T)
    Eigen::VectorXd rhs;         // 2E + T; Dirichlet lift applied, constrained rows hold g
    std::vector<int> constrained_dofs;
    std::vector<double> constrained_values;
    bool gauge = false;
    bool pure_dirichlet = false; // no outlet edge: pressure is only defined up to a constant
    Eigen::VectorXd element_areas;

    [[nodiscard]] int num_velocity_dofs() const { return static_cast<int>(velocity_block.rows()); }
    [[nodiscard]] int num_pressure_dofs() const { return static_cast<int>(div_block.rows()); }
};

struct StateSolution {
    VelocityField u;
    PressureField p;
    double residual_norm = 0.0; // relative residual of the full saddle system
};

[[nodiscard]] SaddleSystem assemble(const Mesh& mesh, const PhaseField& phi, const PhysParams& params,
                                    const BoundaryData& bc, GaugeMode gauge = GaugeMode::Auto);

[[nodiscard]] StateSolution solve_state(const SaddleSystem& system, LinearSolverKind kind = LinearSolverKind::Direct);

/// Repeated state solves on one mesh; reuses the symbolic factorization.
class StateSolver {
public:
    StateSolver(const Mesh& mesh, PhysParams params, BoundaryData bc,
                LinearSolverKind kind = LinearSolverKind::Direct, GaugeMode gauge = GaugeMode::Auto);
    ~StateSolver();
    StateSolver(const StateSolver&) = delete;
    StateSolver& operator=(const StateSolver&) = delete;

    [[nodiscard]] SaddleSystem assemble(const PhaseField& phi) const;
    [[nodiscard]] StateSolution solve(const PhaseField& phi);
    [[nodiscard]] StateSolution solve(const SaddleSystem& system);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct ObjectiveTerms {
    double brinkman = 0.0;        // 1/2 (alpha(phi), |u|^2)
    double dissipation = 0.0;     // mu/2 ||grad_T u||^2
    double body = 0.0;            // -(f, u)
    double ginzburg_landau = 0.0; // gamma P_eps(phi)

    [[nodiscard]] double total() const noexcept { return brinkman + dissipation + body + ginzburg_landau; }
};

[[nodiscard]] ObjectiveTerms objective(const Mesh& mesh, const PhaseField& phi, const VelocityField& u,
                                       const PhysParams& params);

/// W(phi) = int phi - beta |Omega|.
[[nodiscard]] double volume_gap(const PhaseField& phi, double beta, const Mesh& mesh);

} // namespace pfto
