#include "pfto/estimator.hpp"

#include "pfto/quadrature.hpp"

#include <cmath>
#include <numeric>

namespace pfto {

Indicators Indicators::from_squares(std::vector<double> sq)
{
    const double total = std::accumulate(sq.begin(), sq.end(), 0.0);
    return Indicators{std::move(sq), std::sqrt(total)};
}

namespace {

// int_F |v(s)|^2 ds for v = a + s (b - a) along an edge of length len (exact for linear v).
double squared_edge_integral(const std::array<Vec2, 2>& ends, double len)
{
    const Vec2& a = ends[0];
    const Vec2& b = ends[1];
    return len * (a.squaredNorm() + a.dot(b) + b.squaredNorm()) / 3.0;
}

} // namespace

Indicators eta1(const Mesh& mesh, const PhaseField& phi, const VelocityField& u, const PhysParams& params)
{
    const int nt = mesh.num_elements();
    std::vector<double> sq(static_cast<std::size_t>(nt), 0.0);
    const double well_scale = params.gamma / params.epsilon;
    const double flux_scale = params.gamma * params.epsilon;

    std::vector<Vec2> grads(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        grads[static_cast<std::size_t>(t)] = p1_gradient(mesh, phi, t);
        double r2 = 0.0;
        for (const auto& q : triangle_rule_order6()) {
            const double ph = p1_value(mesh, phi, t, q.lambda);
            const double r = well_scale * double_well_prime(ph)
                + 0.5 * params.alpha_prime(ph) * cr_value(mesh, u, t, q.lambda).squaredNorm();
            r2 += q.weight * r * r;
        }
        sq[static_cast<std::size_t>(t)] = mesh.area(t) * mesh.area(t) * r2; // h_T^2 = |T|
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& nb = mesh.edge_elements(e);
        const Vec2 n = edge_normal(mesh, e);
        const double len = mesh.edge_length(e);
        double jump = flux_scale * grads[static_cast<std::size_t>(nb[0])].dot(n);
        if (nb[1] >= 0) jump -= flux_scale * grads[static_cast<std::size_t>(nb[1])].dot(n);
        const double contrib = len * len * jump * jump; // h_F ||J||^2, J constant on F
        sq[static_cast<std::size_t>(nb[0])] += contrib;
        if (nb[1] >= 0) sq[static_cast<std::size_t>(nb[1])] += contrib;
    }
    return Indicators::from_squares(std::move(sq));
}

Indicators eta2(const Mesh& mesh, const PhaseField& phi, const VelocityField& u, const PhysParams& params,
                const BoundaryData& bc)
{
    const int nt = mesh.num_elements();
    std::vector<double> sq(static_cast<std::size_t>(nt), 0.0);

    for (int t = 0; t < nt; ++t) {
        double r2 = 0.0;
        for (const auto& q : triangle_rule_order6()) {
            const double ph = p1_value(mesh, phi, t, q.lambda);
            const Vec2 r = params.alpha(ph) * cr_value(mesh, u, t, q.lambda) - params.force(point_at(mesh, t, q.lambda));
            r2 += q.weight * r.squaredNorm();
        }
        sq[static_cast<std::size_t>(t)] = mesh.area(t) * mesh.area(t) * r2;
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& nb = mesh.edge_elements(e);
        const double len = mesh.edge_length(e);
        if (nb[1] >= 0) {
            std::array<Vec2, 2> ends;
            for (int k = 0; k < 2; ++k) {
                const double s = static_cast<double>(k);
                ends[static_cast<std::size_t>(k)] = cr_value(mesh, u, nb[0], edge_point_lambda(mesh, nb[0], e, s))
                    - cr_value(mesh, u, nb[1], edge_point_lambda(mesh, nb[1], e, s));
            }
            const double contrib = 0.5 * len * squared_edge_integral(ends, len);
            sq[static_cast<std::size_t>(nb[0])] += contrib;
            sq[static_cast<std::size_t>(nb[1])] += contrib;
            continue;
        }
        const BoundaryTag tag = mesh.edge_tag(e);
        if (tag == BoundaryTag::Outlet) continue;
        const auto& ed = mesh.edge(e);
        const Vec2& a = mesh.vertex(ed[0]);
        const Vec2& b = mesh.vertex(ed[1]);
        double d2 = 0.0;
        for (const auto& q : edge_rule_gauss3()) {
            const Vec2 x = (1.0 - q.s) * a + q.s * b;
            const Vec2 diff = cr_value(mesh, u, nb[0], edge_point_lambda(mesh, nb[0], e, q.s)) - bc.value(tag, x);
            d2 += q.weight * diff.squaredNorm();
        }
        sq[static_cast<std::size_t>(nb[0])] += len * len * d2;
    }
    return Indicators::from_squares(std::move(sq));
}

} // namespace pfto
