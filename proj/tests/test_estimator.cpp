#include "pfto/estimator.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace pfto;
using namespace pfto::testing;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void expect_consistent(const Indicators& ind)
{
    for (double x : ind.eta_sq) EXPECT_GE(x, 0.0);
    EXPECT_NEAR(ind.global * ind.global, sum(ind.eta_sq), 1e-12 * std::max(1.0, sum(ind.eta_sq)));
}

} // namespace

TEST(Eta1, LinearPhaseAgainstDuffyOracle)
{
    const Mesh mesh = random_refined(3, 2, 1);
    PhysParams params;
    params.gamma = 0.3;
    params.epsilon = 0.05;
    const PhaseField phi = p1_interpolate(mesh, [](const Vec2& x) { return x.x(); });
    const Indicators ind = eta1(mesh, phi, VelocityField::zero(mesh), params);
    expect_consistent(ind);
    const double ge = params.gamma * params.epsilon;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const double r2 = duffy_integral(mesh, t, [&](const std::array<double, 3>& l) {
            const double r = params.gamma / params.epsilon * double_well_prime(point_at(mesh, t, l).x());
            return r * r;
        });
        double want = mesh.area(t) * r2;
        for (int e : mesh.element_edges(t)) {
            if (!mesh.is_boundary_edge(e)) continue; // grad phi is continuous
            const Vec2 n = edge_normal(mesh, e);
            const double len = mesh.edge_length(e);
            want += len * len * (ge * n.x()) * (ge * n.x());
        }
        EXPECT_NEAR(ind.eta_sq[static_cast<std::size_t>(t)], want, 1e-13 * std::max(1.0, want)) << t;
    }
}

TEST(Eta1, InteriorJumpCountsForBothNeighbours)
{
    const Mesh mesh = unit_square(1);
    // tent with a kink along the diagonal: phi = 1 at (1,0), 0 elsewhere
    PhaseField phi = PhaseField::constant(mesh, 0.0);
    int corner = -1;
    for (int v = 0; v < 4; ++v) {
        if ((mesh.vertex(v) - Vec2(1, 0)).norm() < 1e-14) corner = v;
    }
    phi.nodal[corner] = 1.0;
    PhysParams params;
    const Indicators ind = eta1(mesh, phi, VelocityField::zero(mesh), params);
    int diag = -1;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) diag = e;
    }
    const auto [t0, t1] = mesh.edge_elements(diag);
    const Vec2 n = edge_normal(mesh, diag);
    const double jump = params.gamma * params.epsilon * (p1_gradient(mesh, phi, t0) - p1_gradient(mesh, phi, t1)).dot(n);
    const double face = 2.0 * jump * jump; // h_F |F| = 2
    // the element without the corner has grad phi = 0 and phi = 0: only the face term is left
    const int flat = p1_gradient(mesh, phi, t0).norm() < 1e-14 ? t0 : t1;
    EXPECT_NEAR(ind.eta_sq[static_cast<std::size_t>(flat)], face, 1e-16);
}

TEST(Eta1, VanishesForPureFluid)
{
    const Mesh mesh = random_refined(3, 2, 2);
    const Indicators ind = eta1(mesh, PhaseField::constant(mesh, 1.0), VelocityField::zero(mesh), PhysParams{});
    EXPECT_NEAR(ind.global, 0.0, 1e-15);
}

TEST(Eta1, QuadraticInGammaWithoutFlow)
{
    const Mesh mesh = random_refined(3, 2, 3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PhaseField phi{Eigen::VectorXd(mesh.num_vertices())};
    for (int v = 0; v < mesh.num_vertices(); ++v) phi.nodal[v] = u(rng);
    PhysParams a;
    PhysParams b;
    b.gamma = 2.0 * a.gamma;
    const Indicators ia = eta1(mesh, phi, VelocityField::zero(mesh), a);
    const Indicators ib = eta1(mesh, phi, VelocityField::zero(mesh), b);
    for (std::size_t t = 0; t < ia.eta_sq.size(); ++t) EXPECT_NEAR(ib.eta_sq[t], 4.0 * ia.eta_sq[t], 1e-14 * ib.eta_sq[t]);
}

TEST(Eta1, FlowTermUsesTheBrinkmanSensitivity)
{
    const Mesh mesh = unit_square(2);
    PhysParams params;
    const PhaseField phi = PhaseField::constant(mesh, 0.0); // f'(0) = 0, no gradient
    const VelocityField u = cr_interpolate(mesh, [](const Vec2&) { return Vec2(0.0, 2.0); });
    const Indicators ind = eta1(mesh, phi, u, params);
    // R = alpha'(0) |u|^2 / 2 = -2e4 * 4 / 2 = -4e4
    for (int t = 0; t < mesh.num_elements(); ++t) {
        EXPECT_NEAR(ind.eta_sq[static_cast<std::size_t>(t)], mesh.area(t) * mesh.area(t) * 1.6e9, 1e-3);
    }
}

TEST(Eta2, ContinuousFieldMatchingTheDataGivesZero)
{
    const Mesh mesh = random_refined(3, 2, 4, BoundaryTag::Inlet);
    const auto g = [](const Vec2& x) { return Vec2(x.x() + 2 * x.y(), 1.0 - x.x()); };
    const VelocityField u = cr_interpolate(mesh, g);
    EXPECT_NEAR(eta2(mesh, PhaseField::constant(mesh, 1.0), u, PhysParams{}, BoundaryData{g}).global, 0.0, 1e-13);

    // continuous piecewise-linear bump vanishing on the walls
    const Mesh walls = random_refined(3, 2, 5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    std::vector<Vec2> nodal(static_cast<std::size_t>(walls.num_vertices()), Vec2::Zero());
    for (int v = 0; v < walls.num_vertices(); ++v) {
        const Vec2& p = walls.vertex(v);
        if (std::min({p.x(), p.y(), 1 - p.x(), 1 - p.y()}) > 1e-12) nodal[static_cast<std::size_t>(v)] = Vec2(r(rng), r(rng));
    }
    VelocityField w = VelocityField::zero(walls);
    for (int e = 0; e < walls.num_edges(); ++e) {
        w.set(e, 0.5 * (nodal[static_cast<std::size_t>(walls.edge(e)[0])] + nodal[static_cast<std::size_t>(walls.edge(e)[1])]));
    }
    EXPECT_NEAR(eta2(walls, PhaseField::constant(walls, 1.0), w, PhysParams{}, BoundaryData{}).global, 0.0, 1e-13);
}

TEST(Eta2, ZeroStateGivesZero)
{
    const Mesh mesh = random_refined(3, 2, 6);
    const Indicators ind = eta2(mesh, PhaseField::constant(mesh, 0.0), VelocityField::zero(mesh), PhysParams{}, BoundaryData{});
    EXPECT_EQ(ind.global, 0.0);
}

TEST(Eta2, DiagonalJumpOfUnitRmsTotalsTwo)
{
    const Mesh mesh = unit_square(1, BoundaryTag::Outlet); // boundary terms skipped
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    VelocityField u = VelocityField::zero(mesh);
    for (int i = 0; i < u.dofs.size(); ++i) u.dofs[i] = r(rng);
    int diag = -1;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) diag = e;
    }
    double mean_sq = 0.0;
    for (const auto& q : edge_rule_gauss3()) mean_sq += q.weight * jump_at(mesh, u, diag, q.s).squaredNorm();
    u.dofs /= std::sqrt(mean_sq);
    const Indicators ind = eta2(mesh, PhaseField::constant(mesh, 1.0), u, PhysParams{}, BoundaryData{});
    expect_consistent(ind);
    // 2 x 1/2 h_F int_F |[u]|^2 = sqrt(2) sqrt(2)
    EXPECT_NEAR(ind.global * ind.global, 2.0, 1e-12);
    EXPECT_NEAR(ind.eta_sq[0], 1.0, 1e-12);
}

TEST(Eta2, DirichletAndElementTerms)
{
    const BoundarySpec spec{{BoundaryTag::Inlet, [](const Vec2& x) { return x.x() < 1e-12; }},
                            {BoundaryTag::Outlet, [](const Vec2& x) { return x.x() > 1 - 1e-12; }},
                            {BoundaryTag::Wall, [](const Vec2&) { return true; }}};
    const Mesh mesh = build_rect_mesh(Rect{}, 3, 3, spec);
    const BoundaryData bc{[](const Vec2&) { return Vec2(3.0, 0.0); }};
    // u = 0, phi = 1: only inlet edges contribute h_F |F| |g|^2
    const Indicators a = eta2(mesh, PhaseField::constant(mesh, 1.0), VelocityField::zero(mesh), PhysParams{}, bc);
    EXPECT_NEAR(a.global * a.global, 3.0 * (1.0 / 9.0) * 9.0, 1e-12);

    // constant u = g: jumps and inlet residual vanish, walls see |u|^2, element term h_T^2 ||alpha u||^2
    const VelocityField u = cr_interpolate(mesh, [](const Vec2&) { return Vec2(3.0, 0.0); });
    const Indicators b = eta2(mesh, PhaseField::constant(mesh, 0.0), u, PhysParams{}, bc);
    double want = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) want += mesh.area(t) * mesh.area(t) * 9.0e8;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.is_boundary_edge(e) && mesh.edge_tag(e) == BoundaryTag::Wall) want += std::pow(mesh.edge_length(e), 2) * 9.0;
    }
    EXPECT_NEAR(b.global * b.global, want, 1e-9 * want);
}

TEST(Indicators, FromSquaresIsAdditive)
{
    const Indicators ind = Indicators::from_squares({1.0, 4.0, 4.0});
    EXPECT_DOUBLE_EQ(ind.global, 3.0);
}
