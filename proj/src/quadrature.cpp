#include "pfto/quadrature.hpp"

#include <cmath>

namespace pfto {

namespace {

constexpr TriangleQuadPoint sym3(double a, double b, double w, int rot)
{
    // permutations of (a, b, b)
    return rot == 0 ? TriangleQuadPoint{{a, b, b}, w}
        : rot == 1  ? TriangleQuadPoint{{b, a, b}, w}
                    : TriangleQuadPoint{{b, b, a}, w};
}

// Dunavant (1985), degree 4
constexpr double kA4 = 0.445948490915965;
constexpr double kWA4 = 0.223381589678011;
constexpr double kB4 = 0.091576213509771;
constexpr double kWB4 = 0.109951743655322;

constexpr std::array<TriangleQuadPoint, 6> kOrder4{
    sym3(1.0 - 2.0 * kA4, kA4, kWA4, 0), sym3(1.0 - 2.0 * kA4, kA4, kWA4, 1), sym3(1.0 - 2.0 * kA4, kA4, kWA4, 2),
    sym3(1.0 - 2.0 * kB4, kB4, kWB4, 0), sym3(1.0 - 2.0 * kB4, kB4, kWB4, 1), sym3(1.0 - 2.0 * kB4, kB4, kWB4, 2),
};

// Dunavant (1985), degree 6
constexpr double kA6 = 0.249286745170910;
constexpr double kWA6 = 0.116786275726379;
constexpr double kB6 = 0.063089014491502;
constexpr double kWB6 = 0.050844906370207;
constexpr double kC1 = 0.053145049844817;
constexpr double kC2 = 0.310352451033784;
constexpr double kC3 = 0.636502499121399;
constexpr double kWC6 = 0.082851075618374;

constexpr std::array<TriangleQuadPoint, 12> kOrder6{
    sym3(1.0 - 2.0 * kA6, kA6, kWA6, 0), sym3(1.0 - 2.0 * kA6, kA6, kWA6, 1), sym3(1.0 - 2.0 * kA6, kA6, kWA6, 2),
    sym3(1.0 - 2.0 * kB6, kB6, kWB6, 0), sym3(1.0 - 2.0 * kB6, kB6, kWB6, 1), sym3(1.0 - 2.0 * kB6, kB6, kWB6, 2),
    TriangleQuadPoint{{kC1, kC2, kC3}, kWC6}, TriangleQuadPoint{{kC1, kC3, kC2}, kWC6},
    TriangleQuadPoint{{kC2, kC1, kC3}, kWC6}, TriangleQuadPoint{{kC2, kC3, kC1}, kWC6},
    TriangleQuadPoint{{kC3, kC1, kC2}, kWC6}, TriangleQuadPoint{{kC3, kC2, kC1}, kWC6},
};

const std::array<EdgeQuadPoint, 3> kGauss3{
    EdgeQuadPoint{0.5 - 0.5 * std::sqrt(0.6), 5.0 / 18.0},
    EdgeQuadPoint{0.5, 8.0 / 18.0},
    EdgeQuadPoint{0.5 + 0.5 * std::sqrt(0.6), 5.0 / 18.0},
};

const std::array<EdgeQuadPoint, 2> kGauss2{
    EdgeQuadPoint{0.5 - 0.5 / std::sqrt(3.0), 0.5},
    EdgeQuadPoint{0.5 + 0.5 / std::sqrt(3.0), 0.5},
};

} // namespace

std::span<const TriangleQuadPoint> triangle_rule_order4() noexcept { return kOrder4; }
std::span<const TriangleQuadPoint> triangle_rule_order6() noexcept { return kOrder6; }
std::span<const EdgeQuadPoint> edge_rule_gauss3() noexcept { return kGauss3; }
std::span<const EdgeQuadPoint> edge_rule_gauss2() noexcept { return kGauss2; }

} // namespace pfto
