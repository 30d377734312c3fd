#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pfto {

using Vec2 = Eigen::Vector2d;

enum class BoundaryTag : std::uint8_t { Interior = 0, Inlet, Wall, Outlet };

[[nodiscard]] std::string_view to_string(BoundaryTag tag) noexcept;

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0;
    double x1 = 1.0;
    double y0 = 0.0;
    double y1 = 1.0;

    [[nodiscard]] double area() const noexcept { return (x1 - x0) * (y1 - y0); }
};

/// Tags a boundary edge from its midpoint. Rules are tried in order; the first match wins.
struct BoundaryRule {
    BoundaryTag tag = BoundaryTag::Wall;
    std::function<bool(const Vec2&)> applies;
};

using BoundarySpec = std::vector<BoundaryRule>;

/// Key for an undirected vertex pair.
[[nodiscard]] inline std::uint64_t edge_key(int a, int b) noexcept
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32U)
        | static_cast<std::uint32_t>(b);
}

using EdgeTagMap = std::unordered_map<std::uint64_t, BoundaryTag>;

class MeshRefiner;

/// Conforming triangulation with newest-vertex labels.
///
/// Local vertex 0 of every element is its newest vertex; the refinement edge is
/// the edge (1,2) opposite to it, which is local edge 0. Local edge i is always
/// opposite local vertex i. Elements are positively oriented.
///
/// A mesh produced by refinement remembers its ancestry: its first
/// `ancestor vertex count` vertices are the ancestor's vertices, and every later
/// vertex is the midpoint of two vertices with smaller ids.
class Mesh {
public:
    using Triangle = std::array<int, 3>;

    Mesh() = default;

    /// Builds topology and validates conformity, orientation and boundary tags.
    /// Every boundary edge must have an entry in `boundary_tags`.
    Mesh(std::vector<Vec2> vertices, std::vector<Triangle> elements,
         const EdgeTagMap& boundary_tags, std::vector<int> generation = {});

    [[nodiscard]] int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_elements() const noexcept { return static_cast<int>(elements_.size()); }
    [[nodiscard]] int num_edges() const noexcept { return static_cast<int>(edges_.size()); }

    [[nodiscard]] std::span<const Vec2> vertices() const noexcept { return vertices_; }
    [[nodiscard]] const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    [[nodiscard]] std::span<const Triangle> elements() const noexcept { return elements_; }
    [[nodiscard]] const Triangle& element(int t) const { return elements_[static_cast<std::size_t>(t)]; }

    /// Endpoints of edge e, smaller id first.
    [[nodiscard]] const std::array<int, 2>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    /// Incident elements of edge e; the second is -1 on the boundary.
    [[nodiscard]] const std::array<int, 2>& edge_elements(int e) const
    {
        return edge_elements_[static_cast<std::size_t>(e)];
    }
    /// Edges of element t; entry i is opposite local vertex i.
    [[nodiscard]] const std::array<int, 3>& element_edges(int t) const
    {
        return element_edges_[static_cast<std::size_t>(t)];
    }
    [[nodiscard]] bool is_boundary_edge(int e) const { return edge_elements(e)[1] < 0; }
    [[nodiscard]] BoundaryTag edge_tag(int e) const { return edge_tags_[static_cast<std::size_t>(e)]; }
    [[nodiscard]] std::span<const BoundaryTag> edge_tags() const noexcept { return edge_tags_; }
    [[nodiscard]] bool has_tag(BoundaryTag tag) const;

    [[nodiscard]] double area(int t) const { return areas_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] double total_area() const noexcept { return total_area_; }
    /// Gradients of the barycentric coordinates of element t (constant per element).
    [[nodiscard]] const std::array<Vec2, 3>& grad_lambda(int t) const
    {
        return grad_lambda_[static_cast<std::size_t>(t)];
    }
    [[nodiscard]] Vec2 edge_midpoint(int e) const;
    [[nodiscard]] double edge_length(int e) const;
    [[nodiscard]] Vec2 centroid(int t) const;
    [[nodiscard]] int generation(int t) const { return generation_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] double min_angle() const;

    /// Boundary-edge tags keyed by vertex pair (input form of the constructor).
    [[nodiscard]] EdgeTagMap boundary_tag_map() const;

    // Lineage
    [[nodiscard]] std::uint64_t id() const noexcept { return id_; }
    /// Midpoint parents (a, b) of vertex v, or (-1, -1) for vertices without recorded parents.
    [[nodiscard]] std::array<int, 2> vertex_parents(int v) const;
    /// Element of the immediate ancestor mesh that contains element t, or -1.
    [[nodiscard]] int element_parent(int t) const;
    /// Vertex count of ancestor `ancestor_id`, or -1 when it is not an ancestor.
    [[nodiscard]] int ancestor_vertex_count(std::uint64_t ancestor_id) const;

private:
    friend class MeshRefiner;

    void build_topology(const EdgeTagMap& boundary_tags);

    std::vector<Vec2> vertices_;
    std::vector<Triangle> elements_;
    std::vector<int> generation_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_elements_;
    std::vector<std::array<int, 3>> element_edges_;
    std::vector<BoundaryTag> edge_tags_;
    std::vector<double> areas_;
    std::vector<std::array<Vec2, 3>> grad_lambda_;
    double total_area_ = 0.0;

    std::uint64_t id_ = 0;
    // (ancestor id, ancestor vertex count), nearest ancestor last
    std::vector<std::pair<std::uint64_t, int>> ancestors_;
    // midpoint parents of every vertex created by refinement since the root mesh
    std::vector<std::array<int, 2>> vertex_parents_; // indexed by v - first_new_vertex_
    int first_new_vertex_ = 0;
    std::vector<int> element_parent_;
};

/// Set of element ids selected for refinement.
struct MarkedSet {
    std::vector<int> element_ids; // sorted, unique

    [[nodiscard]] bool contains(int t) const;
    [[nodiscard]] std::size_t size() const noexcept { return element_ids.size(); }
    [[nodiscard]] bool empty() const noexcept { return element_ids.empty(); }
};

/// Sorts and deduplicates.
[[nodiscard]] MarkedSet make_marked_set(std::vector<int> ids);

/// Rotates each triangle so its longest edge becomes the refinement edge
/// (ties broken by the lowest edge id of `mesh`).
[[nodiscard]] std::vector<Mesh::Triangle> longest_edge_labels(const Mesh& mesh);

/// Structured triangulation of `extents` with nx*ny cells, each split into two
/// triangles along a diagonal, refinement edges on the longest edge.
[[nodiscard]] Mesh build_rect_mesh(const Rect& extents, int nx, int ny, const BoundarySpec& boundary_spec);

/// Newest-vertex bisection of every marked element with conforming closure.
/// `rounds` > 1 repeats the refinement on the descendants of the marked set.
[[nodiscard]] Mesh bisect(const Mesh& mesh, const MarkedSet& marked, int rounds = 1);

/// Two full bisection sweeps: every triangle becomes four, every edge is halved.
[[nodiscard]] Mesh uniform_refine(const Mesh& mesh);

struct MeshMetrics {
    std::vector<double> h_element; // sqrt(area)
    std::vector<double> h_edge;    // edge length
    std::vector<Vec2> edge_normal; // unit, outward of edge_elements[0]
};

[[nodiscard]] MeshMetrics mesh_metrics(const Mesh& mesh);

/// Unit normal of edge e pointing out of its first incident element.
[[nodiscard]] Vec2 edge_normal(const Mesh& mesh, int e);

} // namespace pfto
