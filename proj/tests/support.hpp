#pragma once

#include "pfto/mesh.hpp"

#include <random>
#include <set>

namespace pfto::testing {

inline BoundarySpec all_tagged(BoundaryTag tag = BoundaryTag::Wall)
{
    return {{tag, [](const Vec2&) { return true; }}};
}

inline Mesh unit_square(int n, BoundaryTag tag = BoundaryTag::Wall)
{
    return build_rect_mesh(Rect{}, n, n, all_tagged(tag));
}

inline MarkedSet all_elements(const Mesh& mesh)
{
    std::vector<int> ids(static_cast<std::size_t>(mesh.num_elements()));
    for (int t = 0; t < mesh.num_elements(); ++t) ids[static_cast<std::size_t>(t)] = t;
    return make_marked_set(std::move(ids));
}

inline MarkedSet random_marks(const Mesh& mesh, double fraction, std::mt19937_64& rng)
{
    std::bernoulli_distribution pick(fraction);
    std::vector<int> ids;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        if (pick(rng)) ids.push_back(t);
    }
    if (ids.empty()) ids.push_back(std::uniform_int_distribution<int>(0, mesh.num_elements() - 1)(rng));
    return make_marked_set(std::move(ids));
}

/// Locally refined mesh: `rounds` of random marking on an n x n square.
inline Mesh random_refined(int n, int rounds, std::uint64_t seed, BoundaryTag tag = BoundaryTag::Wall)
{
    std::mt19937_64 rng(seed);
    Mesh mesh = unit_square(n, tag);
    for (int r = 0; r < rounds; ++r) mesh = bisect(mesh, random_marks(mesh, 0.3, rng));
    return mesh;
}

/// Vertex sets of all elements, order independent.
inline std::set<std::array<int, 3>> element_sets(const Mesh& mesh)
{
    std::set<std::array<int, 3>> out;
    for (const auto& tri : mesh.elements()) {
        auto s = tri;
        std::sort(s.begin(), s.end());
        out.insert(s);
    }
    return out;
}

} // namespace pfto::testing
