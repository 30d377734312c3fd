#pragma once

#include "pfto/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <initializer_list>
#include <vector>

namespace pfto {

using SparseMatrix = Eigen::SparseMatrix<double>;
using VectorFunction = std::function<Vec2(const Vec2&)>;
using ScalarFunction = std::function<double(const Vec2&)>;

/// Conforming P1 field, one value per mesh vertex.
struct PhaseField {
    Eigen::VectorXd nodal;

    [[nodiscard]] static PhaseField constant(const Mesh& mesh, double value)
    {
        return PhaseField{Eigen::VectorXd::Constant(mesh.num_vertices(), value)};
    }
};

/// Crouzeix-Raviart P1 velocity. Component c of edge e is stored at c * num_edges + e
/// and equals the value at the edge midpoint (= edge mean).
struct VelocityField {
    Eigen::VectorXd dofs;

    [[nodiscard]] static VelocityField zero(const Mesh& mesh)
    {
        return VelocityField{Eigen::VectorXd::Zero(2 * mesh.num_edges())};
    }
    [[nodiscard]] int num_edges() const noexcept { return static_cast<int>(dofs.size() / 2); }
    [[nodiscard]] Vec2 at(int e) const { return {dofs[e], dofs[num_edges() + e]}; }
    void set(int e, const Vec2& v)
    {
        dofs[e] = v.x();
        dofs[num_edges() + e] = v.y();
    }
};

/// Piecewise-constant pressure, one value per element.
struct PressureField {
    Eigen::VectorXd cell;
};

struct EdgeValue {
    int edge;
    Vec2 value;
};

// --- pointwise evaluation on element t (barycentric coordinates) ---

[[nodiscard]] double p1_value(const Mesh& mesh, const PhaseField& phi, int t, const std::array<double, 3>& lambda);
[[nodiscard]] Vec2 p1_gradient(const Mesh& mesh, const PhaseField& phi, int t);
/// CR basis on t: psi_i = 1 - 2 lambda_i for the edge opposite vertex i.
[[nodiscard]] Vec2 cr_value(const Mesh& mesh, const VelocityField& u, int t, const std::array<double, 3>& lambda);
/// Row c holds the gradient of component c.
[[nodiscard]] Eigen::Matrix2d cr_gradient(const Mesh& mesh, const VelocityField& u, int t);
[[nodiscard]] Vec2 point_at(const Mesh& mesh, int t, const std::array<double, 3>& lambda);
/// Barycentric coordinates on element t of a point on its local edge i at parameter s.
[[nodiscard]] std::array<double, 3> edge_point_lambda(const Mesh& mesh, int t, int e, double s);

/// Edge means of g on every boundary edge whose tag is in `tags` (3-point Gauss).
[[nodiscard]] std::vector<EdgeValue> cr_boundary_values(const VectorFunction& g, const Mesh& mesh,
                                                        std::initializer_list<BoundaryTag> tags);

/// CR interpolant via edge means (3-point Gauss) of g on every edge.
[[nodiscard]] VelocityField cr_interpolate(const Mesh& mesh, const VectorFunction& g);

/// Nodal interpolant of a scalar function.
[[nodiscard]] PhaseField p1_interpolate(const Mesh& mesh, const ScalarFunction& f);

/// Exact transfer of a P1 field to a mesh refined from `parent`.
[[nodiscard]] PhaseField p1_prolongate(const Mesh& parent, const Mesh& child, const PhaseField& phi);

/// Conforming P2 field in Lagrange form.
struct QuadraticField {
    std::vector<Vec2> vertex_values;
    std::vector<Vec2> edge_values; // at edge midpoints

    [[nodiscard]] Vec2 value(const Mesh& mesh, int t, const std::array<double, 3>& lambda) const;
};

/// Averaging connection operator from zero-boundary CR fields to conforming P2.
[[nodiscard]] QuadraticField enrich_cr_to_conforming(const VelocityField& v, const Mesh& mesh);

// --- standard matrices ---

[[nodiscard]] SparseMatrix p1_mass_matrix(const Mesh& mesh);
[[nodiscard]] SparseMatrix p1_stiffness_matrix(const Mesh& mesh);
/// Scalar broken stiffness of the CR space (one velocity component).
[[nodiscard]] SparseMatrix cr_stiffness_matrix(const Mesh& mesh);
/// Scalar CR mass matrix weighted by w(x) (order-4 quadrature).
[[nodiscard]] SparseMatrix cr_weighted_mass_matrix(const Mesh& mesh, const std::function<double(int, const std::array<double, 3>&)>& weight);

/// Integral of a P1 field.
[[nodiscard]] double p1_integral(const Mesh& mesh, const PhaseField& phi);

/// Broken H1 seminorm ||grad_T v||.
[[nodiscard]] double cr_broken_h1(const Mesh& mesh, const VelocityField& v);

/// Constant divergence of v on element t.
[[nodiscard]] double cr_divergence(const Mesh& mesh, const VelocityField& v, int t);

} // namespace pfto
