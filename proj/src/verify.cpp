#include "pfto/verify.hpp"

#include "pfto/quadrature.hpp"

#include <cmath>

namespace pfto {

namespace manufactured {

namespace {

// a(t) = t^2 (1-t)^2 and its derivatives
double a0(double t) { return t * t * (1.0 - t) * (1.0 - t); }
double a1(double t) { return 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }
double a2(double t) { return 2.0 * (1.0 - 6.0 * t + 6.0 * t * t); }
double a3(double t) { return 12.0 * (2.0 * t - 1.0); }

} // namespace

Vec2 velocity(const Vec2& x)
{
    return {a0(x.x()) * a1(x.y()), -a1(x.x()) * a0(x.y())};
}

Eigen::Matrix2d gradient(const Vec2& x)
{
    Eigen::Matrix2d g;
    g << a1(x.x()) * a1(x.y()), a0(x.x()) * a2(x.y()),
        -a2(x.x()) * a0(x.y()), -a1(x.x()) * a1(x.y());
    return g;
}

double pressure(const Vec2& x)
{
    return x.x() * x.x() * x.x() - 0.25;
}

Vec2 force(const Vec2& x, double mu)
{
    const double lap1 = a2(x.x()) * a1(x.y()) + a0(x.x()) * a3(x.y());
    const double lap2 = -(a3(x.x()) * a0(x.y()) + a1(x.x()) * a2(x.y()));
    return Vec2(-mu * lap1 + 3.0 * x.x() * x.x(), -mu * lap2);
}

} // namespace manufactured

double fit_rate(std::span<const double> h, std::span<const double> err)
{
    const auto n = static_cast<double>(h.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double lx = std::log(h[i]);
        const double ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy manufactured_study(int n0, int levels, LinearSolverKind solver)
{
    PhysParams params;
    params.body_force = [mu = params.mu](const Vec2& x) { return manufactured::force(x, mu); };
    const BoundarySpec walls{{BoundaryTag::Wall, [](const Vec2&) { return true; }}};
    Mesh mesh = build_rect_mesh(Rect{}, n0, n0, walls);
    const BoundaryData bc{};

    ConvergenceStudy study;
    for (int l = 0; l < levels; ++l) {
        if (l > 0) mesh = uniform_refine(mesh);
        const PhaseField fluid = PhaseField::constant(mesh, 1.0);
        StateSolver state(mesh, params, bc, solver);
        const StateSolution sol = state.solve(fluid);

        ConvergenceLevel rec;
        rec.elements = mesh.num_elements();
        rec.h = 1.0 / (n0 * std::pow(2.0, l));
        double e1 = 0.0, e0 = 0.0;
        for (int t = 0; t < mesh.num_elements(); ++t) {
            const Eigen::Matrix2d gh = cr_gradient(mesh, sol.u, t);
            for (const auto& q : triangle_rule_order6()) {
                const Vec2 x = point_at(mesh, t, q.lambda);
                const double w = q.weight * mesh.area(t);
                e1 += w * (manufactured::gradient(x) - gh).squaredNorm();
                e0 += w * (manufactured::velocity(x) - cr_value(mesh, sol.u, t, q.lambda)).squaredNorm();
            }
        }
        rec.energy_error = std::sqrt(e1);
        rec.l2_error = std::sqrt(e0);
        const double unorm = cr_broken_h1(mesh, sol.u);
        for (int t = 0; t < mesh.num_elements(); ++t) {
            rec.max_divergence = std::max(rec.max_divergence, std::abs(cr_divergence(mesh, sol.u, t)) / unorm);
        }
        rec.eta2 = eta2(mesh, fluid, sol.u, params, bc).global;
        study.levels.push_back(rec);
    }

    std::vector<double> h, e1, e0, eta;
    for (const auto& r : study.levels) {
        h.push_back(r.h);
        e1.push_back(r.energy_error);
        e0.push_back(r.l2_error);
        eta.push_back(r.eta2);
    }
    study.energy_rate = fit_rate(h, e1);
    study.l2_rate = fit_rate(h, e0);
    study.eta2_rate = fit_rate(h, eta);
    return study;
}

} // namespace pfto
