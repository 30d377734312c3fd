#include "pfto/error.hpp"
#include "pfto/phasefield.hpp"
#include "pfto/problem.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/SparseCholesky>

#include <cmath>

using namespace pfto;
using namespace pfto::testing;

namespace {

Eigen::VectorXd lumped_loads(const Mesh& mesh)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        for (int v : mesh.element(t)) out[v] += mesh.area(t) / 3.0;
    }
    return out;
}

PhaseField smooth_interior_phase(const Mesh& mesh)
{
    return p1_interpolate(mesh, [](const Vec2& x) { return 0.5 + 0.2 * std::sin(3 * x.x()) * std::cos(2 * x.y()); });
}

Eigen::VectorXd smooth_source(const Mesh& mesh)
{
    const PhaseField s = p1_interpolate(mesh, [](const Vec2& x) { return std::cos(4 * x.x() + x.y()); });
    return p1_mass_matrix(mesh) * s.nodal;
}

ProblemSpec small_channel()
{
    ProblemSpec spec = preset("left_inflow");
    spec.nx = 8;
    spec.ny = 8;
    return spec;
}

} // namespace

TEST(SensitivitySource, VanishesAtWellMinimaAndCentre)
{
    const Mesh mesh = random_refined(3, 2, 1);
    const PhysParams params;
    const OptParams opt;
    OptState state;
    for (double c : {1.0, 0.5}) {
        const Eigen::VectorXd s = sensitivity_source(mesh, PhaseField::constant(mesh, c), VelocityField::zero(mesh),
                                                     state, params, opt);
        EXPECT_LE(s.cwiseAbs().maxCoeff(), 1e-15) << c;
    }
}

TEST(SensitivitySource, SolidWithUnitFlowIsMinusTenThousandLumped)
{
    const Mesh mesh = random_refined(3, 2, 2);
    PhysParams params;
    params.gamma = params.epsilon; // gamma / eps = 1
    const OptParams opt;
    const OptState state;
    const VelocityField u = cr_interpolate(mesh, [](const Vec2&) { return Vec2(1.0, 0.0); });
    const Eigen::VectorXd s = sensitivity_source(mesh, PhaseField::constant(mesh, 0.0), u, state, params, opt);
    const Eigen::VectorXd want = -1.0e4 * lumped_loads(mesh);
    EXPECT_LE((s - want).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SensitivitySource, MultiplierShiftIsAConstantDensity)
{
    const Mesh mesh = random_refined(3, 1, 3);
    const PhysParams params;
    OptParams opt;
    opt.beta = 0.3;
    OptState state;
    state.ell = 2.0;
    state.zeta = 5.0;
    const PhaseField phi = PhaseField::constant(mesh, 0.5);
    const double gap = volume_gap(phi, opt.beta, mesh);
    EXPECT_NEAR(gap, 0.2, 1e-14);
    const Eigen::VectorXd s = sensitivity_source(mesh, phi, VelocityField::zero(mesh), state, params, opt);
    EXPECT_LE((s - (2.0 + 5.0 * 0.2) * lumped_loads(mesh)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GradientFlow, ConstantIsAFixedPoint)
{
    const Mesh mesh = random_refined(3, 2, 4);
    const PhysParams params;
    const OptParams opt;
    const GradientFlow flow(mesh, params, opt);
    for (double c : {0.0, 0.37, 1.0}) {
        const PhaseField phi = PhaseField::constant(mesh, c);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mesh.num_vertices());
        EXPECT_LE((flow.step(phi, zero).nodal.array() - c).abs().maxCoeff(), 1e-12);
        EXPECT_LE((flow.step(phi, zero, 1.0e3).nodal.array() - c).abs().maxCoeff(), 1e-12);
    }
}

TEST(GradientFlow, OutputStaysInTheBox)
{
    const Mesh mesh = random_refined(3, 2, 5);
    const PhysParams params;
    OptParams opt;
    opt.dt = 1.0;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 100.0);
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd src(mesh.num_vertices());
        for (int i = 0; i < src.size(); ++i) src[i] = n(rng);
        for (double zeta : {0.0, 100.0}) {
            const PhaseField out = gradient_flow_step(mesh, smooth_interior_phase(mesh), src, opt, params, zeta);
            EXPECT_GE(out.nodal.minCoeff(), 0.0);
            EXPECT_LE(out.nodal.maxCoeff(), 1.0);
        }
    }
}

TEST(GradientFlow, SolvesTheStabilizedSystemWhenTheClampIsIdle)
{
    const Mesh mesh = random_refined(4, 2, 6);
    const PhysParams params;
    OptParams opt;
    opt.dt = 1e-4;
    const GradientFlow flow(mesh, params, opt);
    const PhaseField phi = smooth_interior_phase(mesh);
    const Eigen::VectorXd src = 10.0 * smooth_source(mesh);
    const double c = 1.0 / opt.dt + opt.s_tilde / params.epsilon;
    const SparseMatrix& m = flow.mass();
    const SparseMatrix& k = flow.stiffness();

    const PhaseField plain = flow.step(phi, src);
    ASSERT_GT(plain.nodal.minCoeff(), 0.0);
    ASSERT_LT(plain.nodal.maxCoeff(), 1.0);
    Eigen::VectorXd r = c * (m * (plain.nodal - phi.nodal)) + params.gamma * params.epsilon * (k * plain.nodal) + src;
    EXPECT_LE(r.norm(), 1e-10 * src.norm());

    const double zeta = 250.0;
    const PhaseField vol = flow.step(phi, src, zeta);
    const Eigen::VectorXd mvec = m * Eigen::VectorXd::Ones(mesh.num_vertices());
    r = c * (m * (vol.nodal - phi.nodal)) + params.gamma * params.epsilon * (k * vol.nodal)
        + zeta * mvec * mvec.dot(vol.nodal - phi.nodal) + src;
    EXPECT_LE(r.norm(), 1e-10 * src.norm());
}

TEST(GradientFlow, VolumeCorrectionIsConsistentWithTheClamp)
{
    const Mesh mesh = random_refined(4, 2, 7);
    const PhysParams params;
    OptParams opt;
    opt.dt = 1e-2;
    const GradientFlow flow(mesh, params, opt);
    const PhaseField phi = smooth_interior_phase(mesh);
    const Eigen::VectorXd src = 1e3 * smooth_source(mesh);
    const double zeta = 500.0;
    const PhaseField out = flow.step(phi, src, zeta);
    ASSERT_TRUE((out.nodal.array() == 0.0).any() || (out.nodal.array() == 1.0).any()) << "bounds must be active";

    // independent reconstruction: phi+ = clamp(A^-1 (c M phi - src) - s A^-1 m) with s = zeta m.(phi+ - phi)
    const double c = 1.0 / opt.dt + opt.s_tilde / params.epsilon;
    const SparseMatrix a = c * flow.mass() + params.gamma * params.epsilon * flow.stiffness();
    const Eigen::SimplicialLLT<SparseMatrix> llt(a);
    const Eigen::VectorXd mvec = flow.mass() * Eigen::VectorXd::Ones(mesh.num_vertices());
    const Eigen::VectorXd free = llt.solve(Eigen::VectorXd(c * (flow.mass() * phi.nodal) - src));
    const Eigen::VectorXd w = llt.solve(mvec);
    const double s = zeta * mvec.dot(out.nodal - phi.nodal);
    const Eigen::VectorXd rebuilt = (free - s * w).cwiseMax(0.0).cwiseMin(1.0);
    EXPECT_LE((rebuilt - out.nodal).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GradientFlow, UpdateIsFirstOrderInTheStep)
{
    const Mesh mesh = random_refined(4, 2, 8);
    const PhysParams params;
    const PhaseField phi = smooth_interior_phase(mesh);
    const Eigen::VectorXd src = smooth_source(mesh);
    const SparseMatrix m = p1_mass_matrix(mesh);
    const auto update_norm = [&](double dt) {
        OptParams opt;
        opt.dt = dt;
        const Eigen::VectorXd d = gradient_flow_step(mesh, phi, src, opt, params).nodal - phi.nodal;
        return std::sqrt(d.dot(m * d));
    };
    const double full = update_norm(1e-8);
    const double half = update_norm(0.5e-8);
    EXPECT_GT(full, 0.0);
    EXPECT_NEAR(half / full, 0.5, 1e-4);
}

TEST(GradientFlow, FrozenStateEnergyDecays)
{
    const ProblemSpec spec = small_channel();
    const Mesh mesh = initial_mesh(spec);
    OptParams opt = spec.opt;
    opt.dt /= 100.0;
    StateSolver solver(mesh, spec.phys, spec.bc);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    PhaseField phi{Eigen::VectorXd(mesh.num_vertices())};
    for (int v = 0; v < mesh.num_vertices(); ++v) phi.nodal[v] = u(rng);
    const VelocityField vel = solver.solve(phi).u;
    OptState state = OptState::initial(opt);
    state.ell = 3.0;
    const GradientFlow flow(mesh, spec.phys, opt);
    const auto energy = [&](const PhaseField& p) {
        const ObjectiveTerms t = objective(mesh, p, vel, spec.phys);
        return augmented_lagrangian(ObjectiveTerms{t.brinkman, 0.0, 0.0, t.ginzburg_landau},
                                    volume_gap(p, opt.beta, mesh), state.ell, state.zeta);
    };
    double previous = energy(phi);
    for (int step = 0; step < 10; ++step) {
        phi = flow.step(phi, sensitivity_source(mesh, phi, vel, state, spec.phys, opt), state.zeta);
        const double e = energy(phi);
        EXPECT_LE(e, previous + 1e-10) << "step " << step;
        previous = e;
    }
}

TEST(OptParams, ValidationNamesTheField)
{
    for (const auto& [field, mutate] : std::vector<std::pair<std::string, std::function<void(OptParams&)>>>{
             {"dt", [](OptParams& o) { o.dt = 0.0; }},
             {"beta", [](OptParams& o) { o.beta = 1.5; }},
             {"kappa", [](OptParams& o) { o.kappa = 0.9; }},
             {"n_outer", [](OptParams& o) { o.n_outer = 0; }},
             {"zeta0", [](OptParams& o) { o.zeta0 = 0.0; }},
             {"s_tilde", [](OptParams& o) { o.s_tilde = -1.0; }}}) {
        OptParams o;
        mutate(o);
        try {
            validate(o);
            ADD_FAILURE() << field;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Config);
            EXPECT_NE(std::string(e.what()).find(field), std::string::npos);
        }
    }
}

TEST(Optimize, SingleOuterLoopWithoutInnerStepsKeepsPhi)
{
    const ProblemSpec spec = small_channel();
    const Mesh mesh = initial_mesh(spec);
    OptParams opt = spec.opt;
    opt.n_outer = 1;
    opt.n_inner = 0;
    opt.ell0 = 0.25;
    const PhaseField phi0 = p1_interpolate(mesh, [](const Vec2& x) { return x.y(); });
    const OptimizeResult r = optimize_on_mesh(mesh, phi0, OptState::initial(opt), spec.phys, opt, spec.bc);
    EXPECT_EQ(r.phi.nodal, phi0.nodal);
    const StateSolution direct = solve_state(assemble(mesh, phi0, spec.phys, spec.bc));
    EXPECT_LE((r.u.dofs - direct.u.dofs).cwiseAbs().maxCoeff(), 1e-10 * direct.u.dofs.cwiseAbs().maxCoeff());
    const double gap = volume_gap(phi0, opt.beta, mesh);
    EXPECT_NEAR(r.state.ell, 0.25 + opt.zeta0 * gap, 1e-12);
    EXPECT_NEAR(r.state.zeta, opt.zeta0 * opt.kappa, 1e-12);
    ASSERT_EQ(r.state.history.size(), 1U);
    const IterationRecord& rec = r.state.history[0];
    EXPECT_NEAR(rec.volume_gap, gap, 1e-15);
    const ObjectiveTerms terms = objective(mesh, phi0, direct.u, spec.phys);
    EXPECT_NEAR(rec.terms.total(), terms.total(), 1e-9 * terms.total());
    EXPECT_NEAR(rec.lagrangian, augmented_lagrangian(terms, gap, r.state.ell, r.state.zeta), 1e-9 * terms.total());
    EXPECT_EQ(rec.vertices, mesh.num_vertices());
}

TEST(Optimize, PenaltyFollowsGeometricGrowth)
{
    const ProblemSpec spec = small_channel();
    const Mesh mesh = initial_mesh(spec);
    OptParams opt = spec.opt;
    opt.n_outer = 7;
    opt.n_inner = 2;
    const OptimizeResult r = optimize_on_mesh(mesh, initial_phase(spec, mesh), OptState::initial(opt), spec.phys, opt, spec.bc);
    EXPECT_EQ(r.state.multiplier_updates, 7);
    EXPECT_NEAR(r.state.zeta, opt.zeta0 * std::pow(opt.kappa, 7), 1e-12 * r.state.zeta);
    ASSERT_EQ(r.state.history.size(), 7U);
    for (std::size_t m = 0; m < r.state.history.size(); ++m) {
        EXPECT_NEAR(r.state.history[m].zeta, opt.zeta0 * std::pow(opt.kappa, static_cast<double>(m + 1)), 1e-9);
        EXPECT_EQ(r.state.history[m].outer, static_cast<int>(m));
    }
    EXPECT_GE(r.phi.nodal.minCoeff(), 0.0);
    EXPECT_LE(r.phi.nodal.maxCoeff(), 1.0);
}

TEST(Optimize, LagrangianDecreasesThenStagnates)
{
    const ProblemSpec spec = preset("left_inflow");
    const Mesh mesh = initial_mesh(spec);
    const OptimizeResult r = optimize_on_mesh(mesh, initial_phase(spec, mesh), OptState::initial(spec.opt), spec.phys,
                                              spec.opt, spec.bc);
    const auto& h = r.state.history;
    ASSERT_EQ(h.size(), 50U);
    double peak = 0.0;
    for (const auto& rec : h) peak = std::max(peak, rec.lagrangian);
    EXPECT_LT(h.back().lagrangian, 0.8 * h.front().lagrangian);
    EXPECT_LT(h.back().lagrangian, 0.5 * peak);
    for (std::size_t i = 40; i < h.size(); ++i) {
        EXPECT_NEAR(h[i].lagrangian, h.back().lagrangian, 0.02 * h.back().lagrangian);
    }
    EXPECT_LT(std::abs(h.back().volume_gap), 1e-2 * mesh.total_area());
}

TEST(Optimize, SolverFailureCarriesPartialState)
{
    const ProblemSpec spec = small_channel();
    const Mesh mesh = initial_mesh(spec);
    OptParams opt = spec.opt;
    opt.n_outer = 3;
    PhaseField bad = PhaseField::constant(mesh, 0.5);
    bad.nodal[3] = std::nan("");
    try {
        (void)optimize_on_mesh(mesh, bad, OptState::initial(opt), spec.phys, opt, spec.bc);
        FAIL();
    } catch (const OptimizeError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Solve);
        EXPECT_TRUE(e.partial_state().history.empty());
        EXPECT_EQ(e.partial_state().zeta, opt.zeta0);
    }
}
