#pragma once

#include <array>
#include <span>

namespace pfto {

/// Triangle rule in barycentric coordinates; weights sum to 1 (multiply by |T|).
struct TriangleQuadPoint {
    std::array<double, 3> lambda;
    double weight;
};

/// Edge rule on [0,1]; weights sum to 1 (multiply by |F|).
struct EdgeQuadPoint {
    double s;
    double weight;
};

/// 6-point rule, exact for polynomials of degree 4. Used for assembly and objectives.
[[nodiscard]] std::span<const TriangleQuadPoint> triangle_rule_order4() noexcept;

/// 12-point rule, exact for polynomials of degree 6. Used for estimator integrals.
[[nodiscard]] std::span<const TriangleQuadPoint> triangle_rule_order6() noexcept;

/// 3-point Gauss-Legendre, exact to degree 5.
[[nodiscard]] std::span<const EdgeQuadPoint> edge_rule_gauss3() noexcept;

/// 2-point Gauss-Legendre, exact to degree 3.
[[nodiscard]] std::span<const EdgeQuadPoint> edge_rule_gauss2() noexcept;

} // namespace pfto
