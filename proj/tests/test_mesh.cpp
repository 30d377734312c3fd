#include "pfto/error.hpp"
#include "pfto/mesh.hpp"
#include "pfto/quadrature.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

using namespace pfto;
using pfto::testing::unit_square;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of l0^a l1^b l2^c over a triangle of unit area.
double barycentric_monomial(int a, int b, int c)
{
    return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

template <class Rule>
void expect_exact_to(const Rule& rule, int degree)
{
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            for (int c = 0; a + b + c <= degree; ++c) {
                double sum = 0.0;
                for (const auto& q : rule) {
                    sum += q.weight * std::pow(q.lambda[0], a) * std::pow(q.lambda[1], b) * std::pow(q.lambda[2], c);
                }
                EXPECT_NEAR(sum, barycentric_monomial(a, b, c), 1e-14) << a << "," << b << "," << c;
            }
        }
    }
}

void expect_conforming(const Mesh& mesh)
{
    std::map<std::uint64_t, int> count;
    for (const auto& tri : mesh.elements()) {
        for (int i = 0; i < 3; ++i) ++count[edge_key(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>((i + 1) % 3)])];
    }
    ASSERT_EQ(static_cast<int>(count.size()), mesh.num_edges());
    int boundary = 0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& ends = mesh.edge(e);
        const int n = count.at(edge_key(ends[0], ends[1]));
        if (mesh.is_boundary_edge(e)) {
            ++boundary;
            ASSERT_EQ(n, 1);
            ASSERT_NE(mesh.edge_tag(e), BoundaryTag::Interior);
            const Vec2 m = mesh.edge_midpoint(e);
            const double d = std::min({m.x(), 1.0 - m.x(), m.y(), 1.0 - m.y()});
            ASSERT_LT(std::abs(d), 1e-12) << "boundary edge inside the domain";
        } else {
            ASSERT_EQ(n, 2);
        }
    }
    // no hanging node: no vertex lies in the interior of an edge
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Vec2 m = mesh.edge_midpoint(e);
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (v == mesh.edge(e)[0] || v == mesh.edge(e)[1]) continue;
            ASSERT_GT((mesh.vertex(v) - m).norm(), 1e-14);
        }
    }
    EXPECT_GT(boundary, 0);
    for (int t = 0; t < mesh.num_elements(); ++t) ASSERT_GT(mesh.area(t), 0.0);
}

} // namespace

TEST(Quadrature, TriangleRulesExactToTheirDegree)
{
    expect_exact_to(triangle_rule_order4(), 4);
    expect_exact_to(triangle_rule_order6(), 6);
}

TEST(Quadrature, EdgeRulesExactToTheirDegree)
{
    for (int k = 0; k <= 5; ++k) {
        double g3 = 0.0;
        for (const auto& q : edge_rule_gauss3()) g3 += q.weight * std::pow(q.s, k);
        EXPECT_NEAR(g3, 1.0 / (k + 1), 1e-15);
        if (k <= 3) {
            double g2 = 0.0;
            for (const auto& q : edge_rule_gauss2()) g2 += q.weight * std::pow(q.s, k);
            EXPECT_NEAR(g2, 1.0 / (k + 1), 1e-15);
        }
    }
}

TEST(BuildRectMesh, SmallestSquare)
{
    const Mesh m = unit_square(1);
    EXPECT_EQ(m.num_vertices(), 4);
    EXPECT_EQ(m.num_elements(), 2);
    EXPECT_EQ(m.num_edges(), 5);
    int boundary = 0;
    for (int e = 0; e < m.num_edges(); ++e) boundary += m.is_boundary_edge(e) ? 1 : 0;
    EXPECT_EQ(boundary, 4);
    // refinement edge is the longest edge
    for (int t = 0; t < 2; ++t) EXPECT_NEAR(m.edge_length(m.element_edges(t)[0]), std::sqrt(2.0), 1e-15);
}

TEST(BuildRectMesh, TwoByTwoCounts)
{
    const Mesh m = unit_square(2);
    EXPECT_EQ(m.num_vertices(), 9);
    EXPECT_EQ(m.num_elements(), 8);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
    expect_conforming(m);
}

TEST(BuildRectMesh, RejectsDegenerateExtents)
{
    try {
        (void)build_rect_mesh(Rect{1.0, 1.0, 0.0, 1.0}, 2, 2, pfto::testing::all_tagged());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidGeometry);
    }
}

TEST(BuildRectMesh, UncoveredBoundaryIsATaggingError)
{
    const BoundarySpec left_only{{BoundaryTag::Wall, [](const Vec2& x) { return x.x() < 1e-12; }}};
    try {
        (void)build_rect_mesh(Rect{}, 2, 2, left_only);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Tagging);
    }
}

TEST(BuildRectMesh, FirstMatchingRuleWins)
{
    const BoundarySpec spec{{BoundaryTag::Inlet, [](const Vec2& x) { return x.x() < 1e-12; }},
                            {BoundaryTag::Outlet, [](const Vec2& x) { return x.x() < 1e-12 || x.x() > 1 - 1e-12; }},
                            {BoundaryTag::Wall, [](const Vec2&) { return true; }}};
    const Mesh m = build_rect_mesh(Rect{}, 4, 4, spec);
    for (int e = 0; e < m.num_edges(); ++e) {
        if (!m.is_boundary_edge(e)) continue;
        const Vec2 c = m.edge_midpoint(e);
        const BoundaryTag want = c.x() < 1e-12 ? BoundaryTag::Inlet : c.x() > 1 - 1e-12 ? BoundaryTag::Outlet : BoundaryTag::Wall;
        EXPECT_EQ(m.edge_tag(e), want);
    }
}

TEST(Bisect, SharedRefinementEdgeClosesOverTheNeighbour)
{
    const Mesh m = unit_square(1);
    // both triangles have the diagonal as refinement edge
    ASSERT_EQ(m.element_edges(0)[0], m.element_edges(1)[0]);
    const Mesh r = bisect(m, make_marked_set({0}));
    EXPECT_EQ(r.num_elements(), 4);
    EXPECT_EQ(r.num_vertices(), 5);
    expect_conforming(r);
}

TEST(Bisect, SingleTriangle)
{
    const EdgeTagMap tags{{edge_key(0, 1), BoundaryTag::Wall}, {edge_key(1, 2), BoundaryTag::Wall},
                          {edge_key(2, 0), BoundaryTag::Wall}};
    const Mesh m({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, {{0, 1, 2}}, tags);
    const Mesh r = bisect(m, make_marked_set({0}));
    ASSERT_EQ(r.num_elements(), 2);
    ASSERT_EQ(r.num_vertices(), 4);
    EXPECT_TRUE((r.vertex(3) - Vec2(0.5, 0.5)).norm() < 1e-15);
    for (int t = 0; t < 2; ++t) {
        EXPECT_EQ(r.element(t)[0], 3) << "new midpoint is the newest vertex of both children";
        EXPECT_NEAR(r.area(t), 0.25, 1e-15);
        EXPECT_EQ(r.generation(t), 1);
        EXPECT_EQ(r.element_parent(t), 0);
    }
    EXPECT_EQ(r.vertex_parents(3)[0] + r.vertex_parents(3)[1], 3);
}

TEST(Bisect, MarkAllTwiceEqualsUniformRefine)
{
    for (int n : {1, 3}) {
        const Mesh m = unit_square(n);
        const Mesh u = uniform_refine(m);
        const Mesh b = bisect(m, pfto::testing::all_elements(m), 2);
        EXPECT_EQ(u.num_vertices(), b.num_vertices());
        EXPECT_EQ(pfto::testing::element_sets(u), pfto::testing::element_sets(b));
        for (int v = 0; v < u.num_vertices(); ++v) EXPECT_EQ(u.vertex(v), b.vertex(v));
    }
}

TEST(UniformRefine, QuadruplesElementsAndHalvesEdges)
{
    const Mesh m = unit_square(1);
    const Mesh u = uniform_refine(m);
    EXPECT_EQ(u.num_elements(), 8);
    EXPECT_EQ(u.num_vertices(), 9);
    const Mesh u2 = uniform_refine(uniform_refine(unit_square(4)));
    EXPECT_EQ(u2.num_elements(), 32 * 16);
    EXPECT_EQ(u2.num_vertices(), 17 * 17);
    expect_conforming(u2);
    // every old vertex is a prefix of the refined vertex list
    for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(u.vertex(v), m.vertex(v));
}

TEST(UniformRefine, BoundaryTagsInheritedByHalves)
{
    const BoundarySpec spec{{BoundaryTag::Inlet, [](const Vec2& x) { return x.x() < 1e-12; }},
                            {BoundaryTag::Wall, [](const Vec2&) { return true; }}};
    const Mesh u = uniform_refine(build_rect_mesh(Rect{}, 2, 2, spec));
    for (int e = 0; e < u.num_edges(); ++e) {
        if (!u.is_boundary_edge(e)) continue;
        const BoundaryTag want = u.edge_midpoint(e).x() < 1e-12 ? BoundaryTag::Inlet : BoundaryTag::Wall;
        EXPECT_EQ(u.edge_tag(e), want);
    }
}

TEST(Bisect, RandomRoundsStayConformingAndShapeRegular)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(seed);
        Mesh mesh = unit_square(3);
        const double initial_angle = mesh.min_angle();
        for (int round = 0; round < 10; ++round) {
            const Mesh next = bisect(mesh, pfto::testing::random_marks(mesh, 0.2, rng));
            ASSERT_GT(next.num_elements(), mesh.num_elements());
            expect_conforming(next);
            ASSERT_NEAR(next.total_area(), 1.0, 1e-12);
            double sum = 0.0;
            for (int t = 0; t < next.num_elements(); ++t) sum += next.area(t);
            ASSERT_NEAR(sum, 1.0, 1e-12);
            ASSERT_GE(next.min_angle(), 0.5 * initial_angle - 1e-12);
            // every parent is the union of its children
            std::vector<double> child_area(static_cast<std::size_t>(mesh.num_elements()), 0.0);
            for (int t = 0; t < next.num_elements(); ++t) {
                child_area[static_cast<std::size_t>(next.element_parent(t))] += next.area(t);
            }
            for (int t = 0; t < mesh.num_elements(); ++t) {
                ASSERT_NEAR(child_area[static_cast<std::size_t>(t)], mesh.area(t), 1e-14);
            }
            mesh = next;
        }
    }
}

TEST(Bisect, MarkedElementsAreRefined)
{
    std::mt19937_64 rng(7);
    const Mesh mesh = pfto::testing::random_refined(2, 3, 11);
    const MarkedSet marked = pfto::testing::random_marks(mesh, 0.1, rng);
    const Mesh next = bisect(mesh, marked);
    std::vector<int> children(static_cast<std::size_t>(mesh.num_elements()), 0);
    for (int t = 0; t < next.num_elements(); ++t) ++children[static_cast<std::size_t>(next.element_parent(t))];
    for (int t : marked.element_ids) EXPECT_GE(children[static_cast<std::size_t>(t)], 2);
}

TEST(Bisect, RejectsOutOfRangeMarks)
{
    const Mesh m = unit_square(1);
    try {
        (void)bisect(m, make_marked_set({5}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InternalConsistency);
    }
}

TEST(MeshMetrics, SizesAndNormals)
{
    const Mesh m = unit_square(1);
    const MeshMetrics mm = mesh_metrics(m);
    for (double h : mm.h_element) EXPECT_NEAR(h, std::sqrt(0.5), 1e-15);
    for (int e = 0; e < m.num_edges(); ++e) {
        EXPECT_NEAR(mm.h_edge[static_cast<std::size_t>(e)], m.edge_length(e), 1e-15);
        const Vec2 n = mm.edge_normal[static_cast<std::size_t>(e)];
        EXPECT_NEAR(n.norm(), 1.0, 1e-15);
        const Vec2 d = m.vertex(m.edge(e)[1]) - m.vertex(m.edge(e)[0]);
        EXPECT_NEAR(n.dot(d), 0.0, 1e-15);
        // points out of the first incident element
        EXPECT_GT(n.dot(m.edge_midpoint(e) - m.centroid(m.edge_elements(e)[0])), 0.0);
        if (m.is_boundary_edge(e) && std::abs(m.edge_length(e) - 1.0) < 1e-14) EXPECT_NEAR(mm.h_edge[static_cast<std::size_t>(e)], 1.0, 1e-15);
    }
    const Mesh r = bisect(m, make_marked_set({0}));
    const MeshMetrics rm = mesh_metrics(r);
    for (int t = 0; t < r.num_elements(); ++t) {
        EXPECT_NEAR(rm.h_element[static_cast<std::size_t>(t)], std::sqrt(0.5) / std::sqrt(2.0), 1e-15);
    }
}
