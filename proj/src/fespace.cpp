#include "pfto/fespace.hpp"

#include "pfto/error.hpp"
#include "pfto/quadrature.hpp"

#include <algorithm>

namespace pfto {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

int local_index(const Mesh::Triangle& tri, int v)
{
    for (int i = 0; i < 3; ++i) {
        if (tri[static_cast<std::size_t>(i)] == v) return i;
    }
    return -1;
}

} // namespace

double p1_value(const Mesh& mesh, const PhaseField& phi, int t, const std::array<double, 3>& lambda)
{
    const auto& tri = mesh.element(t);
    return lambda[0] * phi.nodal[tri[0]] + lambda[1] * phi.nodal[tri[1]] + lambda[2] * phi.nodal[tri[2]];
}

Vec2 p1_gradient(const Mesh& mesh, const PhaseField& phi, int t)
{
    const auto& tri = mesh.element(t);
    const auto& g = mesh.grad_lambda(t);
    return phi.nodal[tri[0]] * g[0] + phi.nodal[tri[1]] * g[1] + phi.nodal[tri[2]] * g[2];
}

Vec2 cr_value(const Mesh& mesh, const VelocityField& u, int t, const std::array<double, 3>& lambda)
{
    const auto& edges = mesh.element_edges(t);
    Vec2 out = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
        out += (1.0 - 2.0 * lambda[static_cast<std::size_t>(i)]) * u.at(edges[static_cast<std::size_t>(i)]);
    }
    return out;
}

Eigen::Matrix2d cr_gradient(const Mesh& mesh, const VelocityField& u, int t)
{
    const auto& edges = mesh.element_edges(t);
    const auto& g = mesh.grad_lambda(t);
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 3; ++i) {
        out -= 2.0 * u.at(edges[static_cast<std::size_t>(i)]) * g[static_cast<std::size_t>(i)].transpose();
    }
    return out;
}

double cr_divergence(const Mesh& mesh, const VelocityField& v, int t)
{
    return cr_gradient(mesh, v, t).trace();
}

Vec2 point_at(const Mesh& mesh, int t, const std::array<double, 3>& lambda)
{
    const auto& tri = mesh.element(t);
    return lambda[0] * mesh.vertex(tri[0]) + lambda[1] * mesh.vertex(tri[1]) + lambda[2] * mesh.vertex(tri[2]);
}

std::array<double, 3> edge_point_lambda(const Mesh& mesh, int t, int e, double s)
{
    const auto& tri = mesh.element(t);
    const auto& ed = mesh.edge(e);
    std::array<double, 3> lambda{0.0, 0.0, 0.0};
    lambda[static_cast<std::size_t>(local_index(tri, ed[0]))] = 1.0 - s;
    lambda[static_cast<std::size_t>(local_index(tri, ed[1]))] = s;
    return lambda;
}

namespace {

Vec2 edge_mean(const Mesh& mesh, int e, const VectorFunction& g)
{
    const auto& ed = mesh.edge(e);
    const Vec2& a = mesh.vertex(ed[0]);
    const Vec2& b = mesh.vertex(ed[1]);
    Vec2 sum = Vec2::Zero();
    for (const auto& q : edge_rule_gauss3()) sum += q.weight * g((1.0 - q.s) * a + q.s * b);
    return sum;
}

} // namespace

std::vector<EdgeValue> cr_boundary_values(const VectorFunction& g, const Mesh& mesh,
                                          std::initializer_list<BoundaryTag> tags)
{
    std::vector<EdgeValue> out;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        if (std::find(tags.begin(), tags.end(), mesh.edge_tag(e)) == tags.end()) continue;
        out.push_back({e, edge_mean(mesh, e, g)});
    }
    return out;
}

VelocityField cr_interpolate(const Mesh& mesh, const VectorFunction& g)
{
    VelocityField u = VelocityField::zero(mesh);
    for (int e = 0; e < mesh.num_edges(); ++e) u.set(e, edge_mean(mesh, e, g));
    return u;
}

PhaseField p1_interpolate(const Mesh& mesh, const ScalarFunction& f)
{
    PhaseField phi{Eigen::VectorXd(mesh.num_vertices())};
    for (int v = 0; v < mesh.num_vertices(); ++v) phi.nodal[v] = f(mesh.vertex(v));
    return phi;
}

PhaseField p1_prolongate(const Mesh& parent, const Mesh& child, const PhaseField& phi)
{
    int known = -1;
    if (parent.id() == child.id()) {
        known = child.num_vertices();
    } else {
        known = child.ancestor_vertex_count(parent.id());
    }
    if (known != parent.num_vertices() || phi.nodal.size() != parent.num_vertices()) {
        throw Error(ErrorKind::Lineage, "meshes are not in a parent/child relation");
    }
    PhaseField out{Eigen::VectorXd(child.num_vertices())};
    out.nodal.head(known) = phi.nodal;
    for (int v = known; v < child.num_vertices(); ++v) {
        const auto p = child.vertex_parents(v);
        if (p[0] < 0 || p[0] >= v || p[1] >= v) throw Error(ErrorKind::Lineage, "vertex without midpoint parents");
        out.nodal[v] = 0.5 * (out.nodal[p[0]] + out.nodal[p[1]]);
    }
    return out;
}

Vec2 QuadraticField::value(const Mesh& mesh, int t, const std::array<double, 3>& lambda) const
{
    const auto& tri = mesh.element(t);
    const auto& edges = mesh.element_edges(t);
    Vec2 out = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double li = lambda[ii];
        out += li * (2.0 * li - 1.0) * vertex_values[static_cast<std::size_t>(tri[ii])];
        // edge i joins vertices i+1 and i+2
        const double lj = lambda[(ii + 1) % 3];
        const double lk = lambda[(ii + 2) % 3];
        out += 4.0 * lj * lk * edge_values[static_cast<std::size_t>(edges[ii])];
    }
    return out;
}

QuadraticField enrich_cr_to_conforming(const VelocityField& v, const Mesh& mesh)
{
    const auto nv = static_cast<std::size_t>(mesh.num_vertices());
    QuadraticField out;
    out.vertex_values.assign(nv, Vec2::Zero());
    out.edge_values.assign(static_cast<std::size_t>(mesh.num_edges()), Vec2::Zero());

    std::vector<char> on_boundary(nv, 0);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) {
            out.edge_values[static_cast<std::size_t>(e)] = v.at(e);
            continue;
        }
        for (int p : mesh.edge(e)) on_boundary[static_cast<std::size_t>(p)] = 1;
    }

    std::vector<int> count(nv, 0);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& tri = mesh.element(t);
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> lambda{0.0, 0.0, 0.0};
            lambda[static_cast<std::size_t>(i)] = 1.0;
            const auto p = static_cast<std::size_t>(tri[static_cast<std::size_t>(i)]);
            out.vertex_values[p] += cr_value(mesh, v, t, lambda);
            ++count[p];
        }
    }
    for (std::size_t p = 0; p < nv; ++p) {
        if (on_boundary[p]) {
            out.vertex_values[p].setZero();
        } else {
            out.vertex_values[p] /= count[p];
        }
    }
    return out;
}

SparseMatrix p1_mass_matrix(const Mesh& mesh)
{
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(9 * mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& tri = mesh.element(t);
        const double a = mesh.area(t);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                trip.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                                  a * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
            }
        }
    }
    SparseMatrix m(mesh.num_vertices(), mesh.num_vertices());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseMatrix p1_stiffness_matrix(const Mesh& mesh)
{
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(9 * mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& tri = mesh.element(t);
        const auto& g = mesh.grad_lambda(t);
        const double a = mesh.area(t);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                trip.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                                  a * g[static_cast<std::size_t>(i)].dot(g[static_cast<std::size_t>(j)]));
            }
        }
    }
    SparseMatrix k(mesh.num_vertices(), mesh.num_vertices());
    k.setFromTriplets(trip.begin(), trip.end());
    return k;
}

SparseMatrix cr_stiffness_matrix(const Mesh& mesh)
{
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(9 * mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& edges = mesh.element_edges(t);
        const auto& g = mesh.grad_lambda(t);
        const double a = mesh.area(t);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                trip.emplace_back(edges[static_cast<std::size_t>(i)], edges[static_cast<std::size_t>(j)],
                                  4.0 * a * g[static_cast<std::size_t>(i)].dot(g[static_cast<std::size_t>(j)]));
            }
        }
    }
    SparseMatrix k(mesh.num_edges(), mesh.num_edges());
    k.setFromTriplets(trip.begin(), trip.end());
    return k;
}

SparseMatrix cr_weighted_mass_matrix(const Mesh& mesh,
                                     const std::function<double(int, const std::array<double, 3>&)>& weight)
{
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(9 * mesh.num_elements()));
    const auto rule = triangle_rule_order4();
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& edges = mesh.element_edges(t);
        const double a = mesh.area(t);
        Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
        for (const auto& q : rule) {
            const double w = q.weight * a * weight(t, q.lambda);
            const Eigen::Vector3d psi(1.0 - 2.0 * q.lambda[0], 1.0 - 2.0 * q.lambda[1], 1.0 - 2.0 * q.lambda[2]);
            local.noalias() += w * psi * psi.transpose();
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                trip.emplace_back(edges[static_cast<std::size_t>(i)], edges[static_cast<std::size_t>(j)], local(i, j));
            }
        }
    }
    SparseMatrix m(mesh.num_edges(), mesh.num_edges());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

double p1_integral(const Mesh& mesh, const PhaseField& phi)
{
    double sum = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& tri = mesh.element(t);
        sum += mesh.area(t) * (phi.nodal[tri[0]] + phi.nodal[tri[1]] + phi.nodal[tri[2]]) / 3.0;
    }
    return sum;
}

double cr_broken_h1(const Mesh& mesh, const VelocityField& v)
{
    double sum = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) sum += mesh.area(t) * cr_gradient(mesh, v, t).squaredNorm();
    return std::sqrt(sum);
}

} // namespace pfto
