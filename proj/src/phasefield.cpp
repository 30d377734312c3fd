#include "pfto/phasefield.hpp"

#include "pfto/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pfto {

void validate(const OptParams& opt)
{
    const auto fail = [](const char* field, const char* rule) {
        std::ostringstream msg;
        msg << field << " must be " << rule;
        throw Error(ErrorKind::Config, msg.str());
    };
    if (!(opt.dt > 0.0)) fail("dt", "> 0");
    if (!(opt.s_tilde >= 0.0)) fail("s_tilde", ">= 0");
    if (opt.n_outer < 1) fail("n_outer", ">= 1");
    if (opt.n_inner < 0) fail("n_inner", ">= 0");
    if (!(opt.zeta0 > 0.0)) fail("zeta0", "> 0");
    if (!(opt.kappa >= 1.0)) fail("kappa", ">= 1");
    if (!(opt.beta > 0.0 && opt.beta < 1.0)) fail("beta", "in (0, 1)");
}

Eigen::VectorXd sensitivity_source(const Mesh& mesh, const PhaseField& phi, const VelocityField& u,
                                   const OptState& state, const PhysParams& params, const OptParams& opt)
{
    const double shift = state.ell + state.zeta * volume_gap(phi, opt.beta, mesh);
    const double well_scale = params.gamma / params.epsilon;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& tri = mesh.element(t);
        const double a = mesh.area(t);
        for (const auto& q : triangle_rule_order4()) {
            const double ph = p1_value(mesh, phi, t, q.lambda);
            const double density = well_scale * double_well_prime(ph)
                + 0.5 * params.alpha_prime(ph) * cr_value(mesh, u, t, q.lambda).squaredNorm() + shift;
            for (int i = 0; i < 3; ++i) {
                s[tri[static_cast<std::size_t>(i)]] += q.weight * a * density * q.lambda[static_cast<std::size_t>(i)];
            }
        }
    }
    return s;
}

GradientFlow::GradientFlow(const Mesh& mesh, const PhysParams& params, const OptParams& opt)
    : mass_(p1_mass_matrix(mesh)), stiffness_(p1_stiffness_matrix(mesh)),
      shift_(1.0 / opt.dt + opt.s_tilde / params.epsilon)
{
    const SparseMatrix system = shift_ * mass_ + params.gamma * params.epsilon * stiffness_;
    factor_.compute(system);
    if (factor_.info() != Eigen::Success) throw Error(ErrorKind::Solve, "gradient-flow matrix factorization failed");
    ones_mass_ = mass_ * Eigen::VectorXd::Ones(mesh.num_vertices());
    solved_ones_mass_ = factor_.solve(ones_mass_);
}

PhaseField GradientFlow::step(const PhaseField& phi, const Eigen::VectorXd& source, double volume_stiffness) const
{
    const Eigen::VectorXd rhs = shift_ * (mass_ * phi.nodal) - source;
    const Eigen::VectorXd free = factor_.solve(rhs);
    if (!free.allFinite()) throw Error(ErrorKind::Solve, "gradient-flow step produced non-finite values");
    const auto clamp = [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.cwiseMax(0.0).cwiseMin(1.0); };
    if (volume_stiffness <= 0.0) return PhaseField{clamp(free)};

    // phi+ = clamp(free - s A^-1 m) with s = zeta m^T (phi+ - phi); g(s) below is increasing in s.
    const double base = ones_mass_.dot(phi.nodal);
    const auto g = [&](double s) {
        return s - volume_stiffness * (ones_mass_.dot(clamp(free - s * solved_ones_mass_)) - base);
    };
    // Sherman-Morrison value, exact when no bound is active
    const double s0 = volume_stiffness * (ones_mass_.dot(free) - base)
        / (1.0 + volume_stiffness * ones_mass_.dot(solved_ones_mass_));
    const double g0 = g(s0);
    const double scale = std::max(1.0, std::abs(s0));
    if (std::abs(g0) <= 1.0e-14 * scale) return PhaseField{clamp(free - s0 * solved_ones_mass_)};

    double lo = s0, hi = s0, glo = g0, ghi = g0;
    double width = scale * 1.0e-3;
    for (int i = 0; i < 200 && glo > 0.0; ++i, width *= 2.0) glo = g(lo -= width);
    width = scale * 1.0e-3;
    for (int i = 0; i < 200 && ghi < 0.0; ++i, width *= 2.0) ghi = g(hi += width);
    if (glo > 0.0 || ghi < 0.0) throw Error(ErrorKind::Solve, "volume correction could not be bracketed");

    // Illinois regula falsi
    double s = s0;
    int side = 0;
    for (int it = 0; it < 200 && hi - lo > 1.0e-15 * scale; ++it) {
        s = (lo * ghi - hi * glo) / (ghi - glo);
        const double gs = g(s);
        if (gs == 0.0) break;
        if (gs < 0.0) {
            lo = s;
            glo = gs;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = s;
            ghi = gs;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
    }
    return PhaseField{clamp(free - s * solved_ones_mass_)};
}

PhaseField gradient_flow_step(const Mesh& mesh, const PhaseField& phi, const Eigen::VectorXd& source,
                              const OptParams& opt, const PhysParams& params, double volume_stiffness)
{
    return GradientFlow(mesh, params, opt).step(phi, source, volume_stiffness);
}

OptimizeResult optimize_on_mesh(const Mesh& mesh, const PhaseField& phi0, OptState state, const PhysParams& params,
                                const OptParams& opt, const BoundaryData& bc, const OptimizeOptions& options)
{
    validate(params);
    validate(opt);

    PhaseField phi = phi0;
    StateSolution sol;
    try {
        StateSolver solver(mesh, params, bc, options.solver);
        const GradientFlow flow(mesh, params, opt);
        sol = solver.solve(phi);
        for (int outer = 0; outer < opt.n_outer; ++outer) {
            for (int inner = 0; inner < opt.n_inner; ++inner) {
                const Eigen::VectorXd source = sensitivity_source(mesh, phi, sol.u, state, params, opt);
                phi = flow.step(phi, source, opt.implicit_volume ? state.zeta : 0.0);
            }
            state.update_multipliers(volume_gap(phi, opt.beta, mesh), opt.kappa);
            sol = solver.solve(phi);

            IterationRecord rec;
            rec.level = options.level;
            rec.outer = outer;
            rec.terms = objective(mesh, phi, sol.u, params);
            rec.volume_gap = volume_gap(phi, opt.beta, mesh);
            rec.ell = state.ell;
            rec.zeta = state.zeta;
            rec.lagrangian = augmented_lagrangian(rec.terms, rec.volume_gap, state.ell, state.zeta);
            rec.vertices = mesh.num_vertices();
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - options.start).count();
            state.history.push_back(rec);
        }
    } catch (const Error& err) {
        throw OptimizeError(err, std::move(state));
    }
    return OptimizeResult{std::move(phi), std::move(sol.u), std::move(sol.p), std::move(state)};
}

} // namespace pfto
