#include "pfto/mesh.hpp"

#include "pfto/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

namespace pfto {

namespace {

std::uint64_t next_mesh_id()
{
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace

std::string_view to_string(BoundaryTag tag) noexcept
{
    switch (tag) {
    case BoundaryTag::Interior: return "interior";
    case BoundaryTag::Inlet: return "inlet";
    case BoundaryTag::Wall: return "wall";
    case BoundaryTag::Outlet: return "outlet";
    }
    return "unknown";
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Triangle> elements,
           const EdgeTagMap& boundary_tags, std::vector<int> generation)
    : vertices_(std::move(vertices)), elements_(std::move(elements)), generation_(std::move(generation)),
      id_(next_mesh_id())
{
    if (generation_.empty()) generation_.assign(elements_.size(), 0);
    if (generation_.size() != elements_.size()) {
        throw Error(ErrorKind::InternalConsistency, "generation array does not match element count");
    }
    first_new_vertex_ = num_vertices();
    build_topology(boundary_tags);
}

void Mesh::build_topology(const EdgeTagMap& boundary_tags)
{
    const auto nt = elements_.size();
    const int nv = num_vertices();
    areas_.resize(nt);
    grad_lambda_.resize(nt);
    element_edges_.resize(nt);
    edges_.clear();
    edge_elements_.clear();
    total_area_ = 0.0;

    std::unordered_map<std::uint64_t, int> edge_ids;
    edge_ids.reserve(nt * 2);

    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = elements_[t];
        for (int v : tri) {
            if (v < 0 || v >= nv) throw Error(ErrorKind::InternalConsistency, "element references a missing vertex");
        }
        const Vec2& a = vertices_[static_cast<std::size_t>(tri[0])];
        const Vec2& b = vertices_[static_cast<std::size_t>(tri[1])];
        const Vec2& c = vertices_[static_cast<std::size_t>(tri[2])];
        const double area = signed_area(a, b, c);
        if (!(area > 0.0)) {
            std::ostringstream msg;
            msg << "element " << t << " has non-positive area " << area;
            throw Error(ErrorKind::InvalidGeometry, msg.str());
        }
        areas_[t] = area;
        total_area_ += area;
        // grad lambda_i = rot(edge opposite i) / (2|T|)
        const std::array<Vec2, 3> p{a, b, c};
        for (int i = 0; i < 3; ++i) {
            const Vec2& pj = p[static_cast<std::size_t>((i + 1) % 3)];
            const Vec2& pk = p[static_cast<std::size_t>((i + 2) % 3)];
            grad_lambda_[t][static_cast<std::size_t>(i)] = Vec2(pj.y() - pk.y(), pk.x() - pj.x()) / (2.0 * area);
        }

        for (int i = 0; i < 3; ++i) {
            const int va = tri[static_cast<std::size_t>((i + 1) % 3)];
            const int vb = tri[static_cast<std::size_t>((i + 2) % 3)];
            const auto key = edge_key(va, vb);
            auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(edges_.size()));
            if (inserted) {
                edges_.push_back({std::min(va, vb), std::max(va, vb)});
                edge_elements_.push_back({static_cast<int>(t), -1});
            } else {
                auto& inc = edge_elements_[static_cast<std::size_t>(it->second)];
                if (inc[1] >= 0) {
                    throw Error(ErrorKind::InternalConsistency, "edge shared by more than two elements");
                }
                inc[1] = static_cast<int>(t);
            }
            element_edges_[t][static_cast<std::size_t>(i)] = it->second;
        }
    }

    edge_tags_.assign(edges_.size(), BoundaryTag::Interior);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edge_elements_[e][1] >= 0) continue;
        const auto it = boundary_tags.find(edge_key(edges_[e][0], edges_[e][1]));
        if (it == boundary_tags.end() || it->second == BoundaryTag::Interior) {
            std::ostringstream msg;
            const Vec2 m = edge_midpoint(static_cast<int>(e));
            msg << "boundary edge " << e << " at (" << m.x() << ", " << m.y() << ") carries no tag";
            throw Error(ErrorKind::Tagging, msg.str());
        }
        edge_tags_[e] = it->second;
    }
}

bool Mesh::has_tag(BoundaryTag tag) const
{
    return std::find(edge_tags_.begin(), edge_tags_.end(), tag) != edge_tags_.end();
}

Vec2 Mesh::edge_midpoint(int e) const
{
    const auto& ed = edge(e);
    return 0.5 * (vertex(ed[0]) + vertex(ed[1]));
}

double Mesh::edge_length(int e) const
{
    const auto& ed = edge(e);
    return (vertex(ed[1]) - vertex(ed[0])).norm();
}

Vec2 Mesh::centroid(int t) const
{
    const auto& tri = element(t);
    return (vertex(tri[0]) + vertex(tri[1]) + vertex(tri[2])) / 3.0;
}

double Mesh::min_angle() const
{
    double result = std::numbers::pi;
    for (const auto& tri : elements_) {
        for (int i = 0; i < 3; ++i) {
            const Vec2& p = vertex(tri[static_cast<std::size_t>(i)]);
            const Vec2 u = vertex(tri[static_cast<std::size_t>((i + 1) % 3)]) - p;
            const Vec2 w = vertex(tri[static_cast<std::size_t>((i + 2) % 3)]) - p;
            const double c = std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0);
            result = std::min(result, std::acos(c));
        }
    }
    return result;
}

EdgeTagMap Mesh::boundary_tag_map() const
{
    EdgeTagMap tags;
    for (int e = 0; e < num_edges(); ++e) {
        if (is_boundary_edge(e)) tags.emplace(edge_key(edge(e)[0], edge(e)[1]), edge_tag(e));
    }
    return tags;
}

std::array<int, 2> Mesh::vertex_parents(int v) const
{
    if (v < first_new_vertex_ || v >= num_vertices()) return {-1, -1};
    return vertex_parents_[static_cast<std::size_t>(v - first_new_vertex_)];
}

int Mesh::element_parent(int t) const
{
    if (element_parent_.empty()) return -1;
    return element_parent_[static_cast<std::size_t>(t)];
}

int Mesh::ancestor_vertex_count(std::uint64_t ancestor_id) const
{
    for (const auto& [aid, count] : ancestors_) {
        if (aid == ancestor_id) return count;
    }
    return -1;
}

bool MarkedSet::contains(int t) const
{
    return std::binary_search(element_ids.begin(), element_ids.end(), t);
}

MarkedSet make_marked_set(std::vector<int> ids)
{
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return MarkedSet{std::move(ids)};
}

std::vector<Mesh::Triangle> longest_edge_labels(const Mesh& mesh)
{
    std::vector<Mesh::Triangle> out(mesh.elements().begin(), mesh.elements().end());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& edges = mesh.element_edges(t);
        int best = 0;
        for (int i = 1; i < 3; ++i) {
            const double li = mesh.edge_length(edges[static_cast<std::size_t>(i)]);
            const double lb = mesh.edge_length(edges[static_cast<std::size_t>(best)]);
            const double tol = 1e-12 * std::max(li, lb);
            if (li > lb + tol
                || (std::abs(li - lb) <= tol && edges[static_cast<std::size_t>(i)] < edges[static_cast<std::size_t>(best)])) {
                best = i;
            }
        }
        const auto& tri = mesh.element(t);
        out[static_cast<std::size_t>(t)] = {tri[static_cast<std::size_t>(best)],
                                            tri[static_cast<std::size_t>((best + 1) % 3)],
                                            tri[static_cast<std::size_t>((best + 2) % 3)]};
    }
    return out;
}

Mesh build_rect_mesh(const Rect& extents, int nx, int ny, const BoundarySpec& boundary_spec)
{
    if (!(extents.x0 < extents.x1) || !(extents.y0 < extents.y1)) {
        throw Error(ErrorKind::InvalidGeometry, "degenerate rectangle extents");
    }
    if (nx < 1 || ny < 1) throw Error(ErrorKind::InvalidGeometry, "nx and ny must be at least 1");

    const double dx = (extents.x1 - extents.x0) / nx;
    const double dy = (extents.y1 - extents.y0) / ny;
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x = (i == nx) ? extents.x1 : extents.x0 + i * dx;
            const double y = (j == ny) ? extents.y1 : extents.y0 + j * dy;
            vertices.emplace_back(x, y);
        }
    }
    const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

    std::vector<Mesh::Triangle> elements;
    elements.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = id(i, j);
            const int v10 = id(i + 1, j);
            const int v01 = id(i, j + 1);
            const int v11 = id(i + 1, j + 1);
            // alternate the diagonal direction cell by cell
            if ((i + j) % 2 == 0) {
                elements.push_back({v00, v10, v11});
                elements.push_back({v00, v11, v01});
            } else {
                elements.push_back({v00, v10, v01});
                elements.push_back({v10, v11, v01});
            }
        }
    }

    const double tol = 1e-10 * std::max(extents.x1 - extents.x0, extents.y1 - extents.y0);
    const auto on_boundary = [&](const Vec2& p) {
        return std::abs(p.x() - extents.x0) < tol || std::abs(p.x() - extents.x1) < tol
            || std::abs(p.y() - extents.y0) < tol || std::abs(p.y() - extents.y1) < tol;
    };

    EdgeTagMap tags;
    const auto tag_edge = [&](int a, int b) {
        const Vec2 mid = 0.5 * (vertices[static_cast<std::size_t>(a)] + vertices[static_cast<std::size_t>(b)]);
        if (!on_boundary(mid)) return;
        for (const auto& rule : boundary_spec) {
            if (rule.applies && rule.applies(mid)) {
                tags.emplace(edge_key(a, b), rule.tag);
                return;
            }
        }
        std::ostringstream msg;
        msg << "no boundary rule covers the edge at (" << mid.x() << ", " << mid.y() << ")";
        throw Error(ErrorKind::Tagging, msg.str());
    };
    for (int i = 0; i < nx; ++i) {
        tag_edge(id(i, 0), id(i + 1, 0));
        tag_edge(id(i, ny), id(i + 1, ny));
    }
    for (int j = 0; j < ny; ++j) {
        tag_edge(id(0, j), id(0, j + 1));
        tag_edge(id(nx, j), id(nx, j + 1));
    }

    const Mesh unlabeled(vertices, elements, tags);
    return Mesh(std::move(vertices), longest_edge_labels(unlabeled), tags);
}

/// Refinement kernels with access to the lineage fields of Mesh.
class MeshRefiner {
public:
    static Mesh bisect_once(const Mesh& mesh, std::span<const int> marked);
    static void compose_parent(Mesh& fine, const Mesh& middle);
};

Mesh MeshRefiner::bisect_once(const Mesh& mesh, std::span<const int> marked)
{
    const int ne = mesh.num_edges();
    const int nt = mesh.num_elements();
    std::vector<char> split(static_cast<std::size_t>(ne), 0);
    std::deque<int> queue;

    const auto mark_edge = [&](int e) {
        if (split[static_cast<std::size_t>(e)]) return;
        split[static_cast<std::size_t>(e)] = 1;
        for (int t : mesh.edge_elements(e)) {
            if (t >= 0) queue.push_back(t);
        }
    };
    for (int t : marked) {
        if (t < 0 || t >= nt) throw Error(ErrorKind::InternalConsistency, "marked element id out of range");
        mark_edge(mesh.element_edges(t)[0]);
    }
    // closure: an element with any split edge must split its refinement edge
    std::size_t iterations = 0;
    const std::size_t safety = 4 * static_cast<std::size_t>(ne) + 16;
    while (!queue.empty()) {
        if (++iterations > safety) {
            throw Error(ErrorKind::InternalConsistency, "bisection closure did not terminate; refinement labels are corrupted");
        }
        const int t = queue.front();
        queue.pop_front();
        mark_edge(mesh.element_edges(t)[0]);
    }

    std::vector<Vec2> vertices(mesh.vertices().begin(), mesh.vertices().end());
    std::vector<int> midpoint(static_cast<std::size_t>(ne), -1);
    std::vector<std::array<int, 2>> new_parents;
    for (int e = 0; e < ne; ++e) {
        if (!split[static_cast<std::size_t>(e)]) continue;
        midpoint[static_cast<std::size_t>(e)] = static_cast<int>(vertices.size());
        vertices.push_back(mesh.edge_midpoint(e));
        new_parents.push_back(mesh.edge(e));
    }

    std::vector<Mesh::Triangle> elements;
    std::vector<int> generation;
    std::vector<int> parent;
    elements.reserve(static_cast<std::size_t>(nt) * 2);
    const auto emit = [&](const Mesh::Triangle& tri, int gen, int t) {
        elements.push_back(tri);
        generation.push_back(gen);
        parent.push_back(t);
    };
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.element(t);
        const auto& edges = mesh.element_edges(t);
        const int gen = mesh.generation(t);
        const int m = midpoint[static_cast<std::size_t>(edges[0])];
        if (m < 0) {
            emit(tri, gen, t);
            continue;
        }
        const int v0 = tri[0];
        const int v1 = tri[1];
        const int v2 = tri[2];
        // child (m, v0, v1): refinement edge v0-v1 is the parent's local edge 2
        if (const int m2 = midpoint[static_cast<std::size_t>(edges[2])]; m2 >= 0) {
            emit({m2, m, v0}, gen + 2, t);
            emit({m2, v1, m}, gen + 2, t);
        } else {
            emit({m, v0, v1}, gen + 1, t);
        }
        // child (m, v2, v0): refinement edge v2-v0 is the parent's local edge 1
        if (const int m1 = midpoint[static_cast<std::size_t>(edges[1])]; m1 >= 0) {
            emit({m1, m, v2}, gen + 2, t);
            emit({m1, v0, m}, gen + 2, t);
        } else {
            emit({m, v2, v0}, gen + 1, t);
        }
    }

    EdgeTagMap tags;
    for (int e = 0; e < ne; ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        const auto& ed = mesh.edge(e);
        const BoundaryTag tag = mesh.edge_tag(e);
        if (const int m = midpoint[static_cast<std::size_t>(e)]; m >= 0) {
            tags.emplace(edge_key(ed[0], m), tag);
            tags.emplace(edge_key(m, ed[1]), tag);
        } else {
            tags.emplace(edge_key(ed[0], ed[1]), tag);
        }
    }

    Mesh out(std::move(vertices), std::move(elements), tags, std::move(generation));
    out.ancestors_ = mesh.ancestors_;
    out.ancestors_.emplace_back(mesh.id(), mesh.num_vertices());
    out.first_new_vertex_ = mesh.first_new_vertex_;
    out.vertex_parents_ = mesh.vertex_parents_;
    out.vertex_parents_.insert(out.vertex_parents_.end(), new_parents.begin(), new_parents.end());
    out.element_parent_ = std::move(parent);
    return out;
}

void MeshRefiner::compose_parent(Mesh& fine, const Mesh& middle)
{
    for (auto& p : fine.element_parent_) p = middle.element_parent(p);
}

Mesh bisect(const Mesh& mesh, const MarkedSet& marked, int rounds)
{
    if (rounds < 1) throw Error(ErrorKind::InternalConsistency, "bisection rounds must be positive");
    Mesh current = MeshRefiner::bisect_once(mesh, marked.element_ids);
    for (int r = 1; r < rounds; ++r) {
        std::vector<int> next;
        for (int t = 0; t < current.num_elements(); ++t) {
            if (marked.contains(current.element_parent(t))) next.push_back(t);
        }
        Mesh finer = MeshRefiner::bisect_once(current, next);
        MeshRefiner::compose_parent(finer, current);
        current = std::move(finer);
    }
    return current;
}

Mesh uniform_refine(const Mesh& mesh)
{
    std::vector<int> all(static_cast<std::size_t>(mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) all[static_cast<std::size_t>(t)] = t;
    return bisect(mesh, MarkedSet{std::move(all)}, 2);
}

Vec2 edge_normal(const Mesh& mesh, int e)
{
    const auto& ed = mesh.edge(e);
    const Vec2 d = mesh.vertex(ed[1]) - mesh.vertex(ed[0]);
    Vec2 n(d.y(), -d.x());
    n.normalize();
    const int t = mesh.edge_elements(e)[0];
    if (n.dot(mesh.edge_midpoint(e) - mesh.centroid(t)) < 0.0) n = -n;
    return n;
}

MeshMetrics mesh_metrics(const Mesh& mesh)
{
    MeshMetrics m;
    m.h_element.resize(static_cast<std::size_t>(mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) m.h_element[static_cast<std::size_t>(t)] = std::sqrt(mesh.area(t));
    m.h_edge.resize(static_cast<std::size_t>(mesh.num_edges()));
    m.edge_normal.resize(static_cast<std::size_t>(mesh.num_edges()));
    for (int e = 0; e < mesh.num_edges(); ++e) {
        m.h_edge[static_cast<std::size_t>(e)] = mesh.edge_length(e);
        m.edge_normal[static_cast<std::size_t>(e)] = edge_normal(mesh, e);
    }
    return m;
}

} // namespace pfto
