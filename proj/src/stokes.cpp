#include "pfto/stokes.hpp"

#include "pfto/error.hpp"
#include "pfto/quadrature.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>
#ifdef PFTO_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <cmath>
#include <sstream>

namespace pfto {

void validate(const PhysParams& params)
{
    const auto fail = [](const char* field, const char* rule) {
        std::ostringstream msg;
        msg << field << " must be " << rule;
        throw Error(ErrorKind::Config, msg.str());
    };
    if (!(params.mu > 0.0)) fail("mu", "> 0");
    if (!(params.alpha_max >= 0.0)) fail("alpha_max", ">= 0");
    if (!(params.epsilon > 0.0)) fail("epsilon", "> 0");
    if (!(params.gamma > 0.0)) fail("gamma", "> 0");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix divergence_block(const Mesh& mesh)
{
    const int ne = mesh.num_edges();
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(6 * mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& edges = mesh.element_edges(t);
        const auto& g = mesh.grad_lambda(t);
        const double a = mesh.area(t);
        for (int i = 0; i < 3; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            // -(div psi_i e_c, 1)_T with grad psi_i = -2 grad lambda_i
            trip.emplace_back(t, edges[ii], 2.0 * a * g[ii].x());
            trip.emplace_back(t, ne + edges[ii], 2.0 * a * g[ii].y());
        }
    }
    SparseMatrix b(mesh.num_elements(), 2 * ne);
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
}

Eigen::VectorXd body_load(const Mesh& mesh, const PhysParams& params)
{
    const int ne = mesh.num_edges();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * ne);
    if (!params.body_force) return f;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& edges = mesh.element_edges(t);
        const double a = mesh.area(t);
        for (const auto& q : triangle_rule_order4()) {
            const Vec2 fx = params.force(point_at(mesh, t, q.lambda));
            for (int i = 0; i < 3; ++i) {
                const double w = q.weight * a * (1.0 - 2.0 * q.lambda[static_cast<std::size_t>(i)]);
                f[edges[static_cast<std::size_t>(i)]] += w * fx.x();
                f[ne + edges[static_cast<std::size_t>(i)]] += w * fx.y();
            }
        }
    }
    return f;
}

struct Dirichlet {
    std::vector<int> dofs;
    std::vector<double> values;
};

Dirichlet dirichlet_data(const Mesh& mesh, const BoundaryData& bc)
{
    Dirichlet d;
    const int ne = mesh.num_edges();
    for (int e = 0; e < ne; ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        const BoundaryTag tag = mesh.edge_tag(e);
        if (tag == BoundaryTag::Interior) throw Error(ErrorKind::Assembly, "untagged boundary edge");
        if (tag == BoundaryTag::Outlet) continue;
        Vec2 g = Vec2::Zero();
        if (tag == BoundaryTag::Inlet) {
            const auto& ed = mesh.edge(e);
            const Vec2& a = mesh.vertex(ed[0]);
            const Vec2& b = mesh.vertex(ed[1]);
            for (const auto& q : edge_rule_gauss3()) g += q.weight * bc.value(tag, (1.0 - q.s) * a + q.s * b);
        }
        d.dofs.push_back(e);
        d.values.push_back(g.x());
        d.dofs.push_back(ne + e);
        d.values.push_back(g.y());
    }
    return d;
}

SparseMatrix scalar_velocity_operator(const Mesh& mesh, const SparseMatrix& stiffness, const PhaseField& phi,
                                      const PhysParams& params)
{
    SparseMatrix mass = cr_weighted_mass_matrix(mesh, [&](int t, const std::array<double, 3>& lambda) {
        return params.alpha(p1_value(mesh, phi, t, lambda));
    });
    return SparseMatrix(params.mu * stiffness + mass);
}

SaddleSystem build_system(const Mesh& mesh, const SparseMatrix& scalar_op, const SparseMatrix& div,
                          const Eigen::VectorXd& load, const Dirichlet& dir, bool gauge)
{
    const int ne = mesh.num_edges();
    const int nu = 2 * ne;
    const int nt = mesh.num_elements();

    SaddleSystem s;
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(2 * scalar_op.nonZeros()));
    for (int c = 0; c < 2; ++c) {
        for (int k = 0; k < scalar_op.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(scalar_op, k); it; ++it) {
                trip.emplace_back(c * ne + static_cast<int>(it.row()), c * ne + static_cast<int>(it.col()), it.value());
            }
        }
    }
    s.velocity_block.resize(nu, nu);
    s.velocity_block.setFromTriplets(trip.begin(), trip.end());
    s.div_block = div;
    s.constrained_dofs = dir.dofs;
    s.constrained_values = dir.values;
    s.gauge = gauge;
    s.pure_dirichlet = !mesh.has_tag(BoundaryTag::Outlet);
    s.element_areas.resize(nt);
    for (int t = 0; t < nt; ++t) s.element_areas[t] = mesh.area(t);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(nu);
    for (std::size_t i = 0; i < dir.dofs.size(); ++i) g[dir.dofs[i]] = dir.values[i];
    s.rhs.resize(nu + nt);
    s.rhs.head(nu) = load - s.velocity_block * g;
    s.rhs.tail(nt) = -(div * g);
    for (std::size_t i = 0; i < dir.dofs.size(); ++i) s.rhs[dir.dofs[i]] = dir.values[i];
    return s;
}

/// Saddle system with constrained velocity dofs eliminated. With a gauge the
/// first pressure is pinned to zero and the mean is removed afterwards.
struct ReducedSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> free_index; // velocity dof -> reduced index or -1
    int n_free = 0;
    int pinned = 0; // leading pressure dofs dropped (0 or 1)
};

ReducedSystem reduce(const SaddleSystem& s)
{
    const int nu = s.num_velocity_dofs();
    const int np = s.num_pressure_dofs();
    ReducedSystem r;
    r.pinned = s.gauge ? 1 : 0;
    r.free_index.assign(static_cast<std::size_t>(nu), 0);
    for (int d : s.constrained_dofs) r.free_index[static_cast<std::size_t>(d)] = -1;
    for (int d = 0; d < nu; ++d) {
        if (r.free_index[static_cast<std::size_t>(d)] >= 0) r.free_index[static_cast<std::size_t>(d)] = r.n_free++;
    }
    const int n = r.n_free + np - r.pinned;

    Triplets trip;
    trip.reserve(static_cast<std::size_t>(s.velocity_block.nonZeros() + 2 * s.div_block.nonZeros()));
    for (int k = 0; k < s.velocity_block.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s.velocity_block, k); it; ++it) {
            const int i = r.free_index[static_cast<std::size_t>(it.row())];
            const int j = r.free_index[static_cast<std::size_t>(it.col())];
            if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
        }
    }
    for (int k = 0; k < s.div_block.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s.div_block, k); it; ++it) {
            const int j = r.free_index[static_cast<std::size_t>(it.col())];
            if (j < 0 || it.row() < r.pinned) continue;
            const int i = r.n_free + static_cast<int>(it.row()) - r.pinned;
            trip.emplace_back(i, j, it.value());
            trip.emplace_back(j, i, it.value());
        }
    }
    r.matrix.resize(n, n);
    r.matrix.setFromTriplets(trip.begin(), trip.end());
    r.matrix.makeCompressed();

    r.rhs = Eigen::VectorXd::Zero(n);
    for (int d = 0; d < nu; ++d) {
        const int i = r.free_index[static_cast<std::size_t>(d)];
        if (i >= 0) r.rhs[i] = s.rhs[d];
    }
    r.rhs.tail(np - r.pinned) = s.rhs.tail(np - r.pinned);
    return r;
}

StateSolution expand(const SaddleSystem& s, const ReducedSystem& r, const Eigen::VectorXd& x, double residual)
{
    const int nu = s.num_velocity_dofs();
    const int np = s.num_pressure_dofs();
    StateSolution out;
    out.u.dofs.resize(nu);
    for (std::size_t i = 0; i < s.constrained_dofs.size(); ++i) {
        out.u.dofs[s.constrained_dofs[i]] = s.constrained_values[i];
    }
    for (int d = 0; d < nu; ++d) {
        const int i = r.free_index[static_cast<std::size_t>(d)];
        if (i >= 0) out.u.dofs[d] = x[i];
    }
    out.p.cell = Eigen::VectorXd::Zero(np);
    out.p.cell.tail(np - r.pinned) = x.tail(np - r.pinned);
    if (s.gauge) out.p.cell.array() -= out.p.cell.dot(s.element_areas) / s.element_areas.sum();
    out.residual_norm = residual;
    return out;
}

/// Block-diagonal SPD preconditioner: diag(A) on velocity, diag(B diag(A)^-1 B^T) on pressure.
class BlockJacobi {
public:
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

    BlockJacobi() = default;
    template <typename MatType>
    explicit BlockJacobi(const MatType& mat) { compute(mat); }

    void configure(int n_free) { n_free_ = n_free; }

    template <typename MatType>
    BlockJacobi& analyzePattern(const MatType&) { return *this; }

    template <typename MatType>
    BlockJacobi& factorize(const MatType& mat) { return compute(mat); }

    template <typename MatType>
    BlockJacobi& compute(const MatType& mat)
    {
        const auto n = mat.rows();
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < mat.outerSize(); ++k) {
            for (typename MatType::InnerIterator it(mat, k); it; ++it) {
                if (it.row() == it.col() && it.row() < n_free_) diag[it.row()] = it.value();
            }
        }
        for (int k = 0; k < mat.outerSize(); ++k) {
            for (typename MatType::InnerIterator it(mat, k); it; ++it) {
                if (it.row() >= n_free_ && it.col() < n_free_ && diag[it.col()] > 0.0) {
                    diag[it.row()] += it.value() * it.value() / diag[it.col()];
                }
            }
        }
        inv_diag_ = Eigen::VectorXd(n);
        for (Eigen::Index i = 0; i < n; ++i) inv_diag_[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
        return *this;
    }

    template <typename Rhs>
    Eigen::VectorXd solve(const Rhs& b) const { return inv_diag_.cwiseProduct(b); }

    [[nodiscard]] Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
    int n_free_ = 0;
    Eigen::VectorXd inv_diag_;
};

std::string singular_message(const SaddleSystem& s)
{
    std::ostringstream msg;
    msg << "saddle-point factorization failed";
    if (s.pure_dirichlet && !s.gauge) {
        msg << "; pressure gauge is not fixed (no outlet edge and gauge disabled)";
    }
    return msg.str();
}

/// Sparse LU of the reduced saddle system; the symbolic analysis is kept while the size is unchanged.
struct DirectFactor {
    LinearSolverKind kind;
#ifdef PFTO_HAVE_UMFPACK
    Eigen::UmfPackLU<SparseMatrix> umfpack;
#endif
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> sparselu;
    bool analyzed = false;
    Eigen::Index analyzed_size = -1;

    explicit DirectFactor(LinearSolverKind k) : kind(k) {}

    Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b, const SaddleSystem& s)
    {
        if (!analyzed || analyzed_size != a.rows()) {
            analyzed = false;
#ifdef PFTO_HAVE_UMFPACK
            if (kind == LinearSolverKind::Direct) {
                // nested dissection halves the fill of the 2D saddle systems; AMD if METIS is absent
                umfpack.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
                umfpack.analyzePattern(a);
                if (umfpack.info() != Eigen::Success) {
                    umfpack.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
                    umfpack.analyzePattern(a);
                }
            } else {
                sparselu.analyzePattern(a);
            }
#else
            sparselu.analyzePattern(a);
#endif
            analyzed = true;
            analyzed_size = a.rows();
        }
#ifdef PFTO_HAVE_UMFPACK
        if (kind == LinearSolverKind::Direct) {
            umfpack.factorize(a);
            if (umfpack.info() != Eigen::Success) throw Error(ErrorKind::Solve, singular_message(s));
            Eigen::VectorXd x = umfpack.solve(b);
            Eigen::VectorXd r = b - a * x;
            x += umfpack.solve(r);
            return x;
        }
#endif
        sparselu.factorize(a);
        if (sparselu.info() != Eigen::Success) throw Error(ErrorKind::Solve, singular_message(s));
        Eigen::VectorXd x = sparselu.solve(b);
        Eigen::VectorXd r = b - a * x;
        x += sparselu.solve(r);
        return x;
    }
};

} // namespace

SaddleSystem assemble(const Mesh& mesh, const PhaseField& phi, const PhysParams& params, const BoundaryData& bc,
                      GaugeMode gauge)
{
    validate(params);
    if (phi.nodal.size() != mesh.num_vertices()) throw Error(ErrorKind::Assembly, "phase field does not match the mesh");
    const SparseMatrix stiffness = cr_stiffness_matrix(mesh);
    const bool with_gauge = gauge == GaugeMode::Auto && !mesh.has_tag(BoundaryTag::Outlet);
    return build_system(mesh, scalar_velocity_operator(mesh, stiffness, phi, params), divergence_block(mesh),
                        body_load(mesh, params), dirichlet_data(mesh, bc), with_gauge);
}

struct StateSolver::Impl {
    const Mesh& mesh;
    PhysParams params;
    BoundaryData bc;
    LinearSolverKind kind;
    GaugeMode gauge;
    SparseMatrix stiffness;
    SparseMatrix div;
    Eigen::VectorXd load;
    Dirichlet dir;
    DirectFactor direct;

    Impl(const Mesh& m, PhysParams p, BoundaryData b, LinearSolverKind k, GaugeMode g)
        : mesh(m), params(std::move(p)), bc(std::move(b)), kind(k), gauge(g), direct(k)
    {
        validate(params);
        stiffness = cr_stiffness_matrix(mesh);
        div = divergence_block(mesh);
        load = body_load(mesh, params);
        dir = dirichlet_data(mesh, bc);
    }
};

namespace {

Eigen::VectorXd minres_solve(const SparseMatrix& a, const Eigen::VectorXd& b, int n_free, const SaddleSystem& s)
{
    Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper, BlockJacobi> solver;
    solver.preconditioner().configure(n_free);
    solver.setTolerance(1e-13);
    solver.setMaxIterations(static_cast<Eigen::Index>(20 * a.rows()));
    solver.compute(a);
    Eigen::VectorXd x = solver.solve(b);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::Solve, singular_message(s) + " (MINRES did not converge)");
    return x;
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double bn = b.norm();
    const double rn = (a * x - b).norm();
    return bn > 0.0 ? rn / bn : rn;
}

constexpr double max_direct_residual = 1.0e-8;

StateSolution finish(const SaddleSystem& system, const ReducedSystem& r, const Eigen::VectorXd& x)
{
    if (!x.allFinite()) throw Error(ErrorKind::Solve, singular_message(system));
    const double res = relative_residual(r.matrix, x, r.rhs);
    if (res > max_direct_residual) {
        std::ostringstream msg;
        msg << "inaccurate saddle-point solve (relative residual " << res
            << "); the sparse LU or its BLAS backend returned a wrong factorization";
        throw Error(ErrorKind::Solve, msg.str());
    }
    return expand(system, r, x, res);
}

void check_gauge(const SaddleSystem& s)
{
    if (!s.gauge && s.pure_dirichlet) {
        throw Error(ErrorKind::Solve, "pure-Dirichlet velocity without pressure gauge: the saddle system is singular");
    }
}

} // namespace

StateSolver::StateSolver(const Mesh& mesh, PhysParams params, BoundaryData bc, LinearSolverKind kind, GaugeMode gauge)
    : impl_(std::make_unique<Impl>(mesh, std::move(params), std::move(bc), kind, gauge))
{
}

StateSolver::~StateSolver() = default;

SaddleSystem StateSolver::assemble(const PhaseField& phi) const
{
    const Mesh& mesh = impl_->mesh;
    if (phi.nodal.size() != mesh.num_vertices()) throw Error(ErrorKind::Assembly, "phase field does not match the mesh");
    const bool with_gauge = impl_->gauge == GaugeMode::Auto && !mesh.has_tag(BoundaryTag::Outlet);
    return build_system(mesh, scalar_velocity_operator(mesh, impl_->stiffness, phi, impl_->params), impl_->div,
                        impl_->load, impl_->dir, with_gauge);
}

StateSolution StateSolver::solve(const PhaseField& phi)
{
    return solve(assemble(phi));
}

StateSolution StateSolver::solve(const SaddleSystem& system)
{
    check_gauge(system);
    const ReducedSystem r = reduce(system);
    Eigen::VectorXd x;
    if (impl_->kind == LinearSolverKind::Minres) {
        x = minres_solve(r.matrix, r.rhs, r.n_free, system);
    } else {
        x = impl_->direct.solve(r.matrix, r.rhs, system);
    }
    return finish(system, r, x);
}

StateSolution solve_state(const SaddleSystem& system, LinearSolverKind kind)
{
    check_gauge(system);
    const ReducedSystem r = reduce(system);
    Eigen::VectorXd x;
    if (kind == LinearSolverKind::Minres) {
        x = minres_solve(r.matrix, r.rhs, r.n_free, system);
    } else {
        DirectFactor direct(kind);
        x = direct.solve(r.matrix, r.rhs, system);
    }
    return finish(system, r, x);
}

ObjectiveTerms objective(const Mesh& mesh, const PhaseField& phi, const VelocityField& u, const PhysParams& params)
{
    ObjectiveTerms out;
    double gradient_energy = 0.0;
    double well_energy = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const double a = mesh.area(t);
        out.dissipation += 0.5 * params.mu * a * cr_gradient(mesh, u, t).squaredNorm();
        gradient_energy += 0.5 * params.epsilon * a * p1_gradient(mesh, phi, t).squaredNorm();
        for (const auto& q : triangle_rule_order4()) {
            const double ph = p1_value(mesh, phi, t, q.lambda);
            const Vec2 uq = cr_value(mesh, u, t, q.lambda);
            const double w = q.weight * a;
            out.brinkman += 0.5 * w * params.alpha(ph) * uq.squaredNorm();
            well_energy += w * double_well(ph) / params.epsilon;
            if (params.body_force) out.body -= w * params.force(point_at(mesh, t, q.lambda)).dot(uq);
        }
    }
    out.ginzburg_landau = params.gamma * (gradient_energy + well_energy);
    return out;
}

double volume_gap(const PhaseField& phi, double beta, const Mesh& mesh)
{
    return p1_integral(mesh, phi) - beta * mesh.total_area();
}

} // namespace pfto
