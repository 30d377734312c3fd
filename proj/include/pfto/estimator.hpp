#pragma once

#include "pfto/fespace.hpp"
#include "pfto/stokes.hpp"

#include <vector>

namespace pfto {

/// Per-element squared indicators and the global estimator sqrt(sum).
struct Indicators {
    std::vector<double> eta_sq;
    double global = 0.0;

    [[nodiscard]] static Indicators from_squares(std::vector<double> sq);
};

/// Residual of the phase-field optimality condition.
/// eta1^2(T) = h_T^2 ||R_T1||^2 + sum_{F in dT} h_F ||J_F1||^2, with
/// R_T1 = (gamma/eps) f'(phi) + alpha'(phi)|u|^2/2 and J_F1 = gamma eps [grad phi].n
/// (gamma eps grad phi.n on the boundary). Interior faces count fully for both neighbours.
[[nodiscard]] Indicators eta1(const Mesh& mesh, const PhaseField& phi, const VelocityField& u,
                              const PhysParams& params);

/// State residual plus nonconformity.
/// eta2^2(T) = h_T^2 ||alpha(phi) u - f||^2 + sum_{interior F} h_F/2 ||[u]||^2
///           + sum_{Dirichlet F} h_F ||u - g||^2. Outlet edges contribute nothing.
[[nodiscard]] Indicators eta2(const Mesh& mesh, const PhaseField& phi, const VelocityField& u,
                              const PhysParams& params, const BoundaryData& bc);

} // namespace pfto
