#pragma once

#include "pfto/fespace.hpp"
#include "pfto/phasefield.hpp"
#include "pfto/stokes.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pfto {

enum class InitialKind { Constant, Random, Mask };

/// How the starting phase field is built on the initial mesh.
struct InitialField {
    InitialKind kind = InitialKind::Constant;
    std::optional<double> value; // constant; defaults to beta
    std::uint64_t seed = 0;      // random
    std::string mask_path;       // mask
};

/// Geometry, boundary data and parameters of one benchmark run.
struct ProblemSpec {
    std::string name;
    Rect domain;
    int nx = 8;
    int ny = 8;
    BoundarySpec boundary;
    BoundaryData bc;
    PhysParams phys;
    OptParams opt;
    InitialField initial;
};

[[nodiscard]] std::vector<std::string> preset_names();

/// left_inflow, three_inflows or bypass. Unknown names raise a Config error listing the presets.
[[nodiscard]] ProblemSpec preset(std::string_view name);

[[nodiscard]] Mesh initial_mesh(const ProblemSpec& spec);

/// Mask files hold rows of values in [0, 1], first row at the top of the domain;
/// each vertex takes the value of the cell it falls in.
[[nodiscard]] PhaseField initial_phase(const ProblemSpec& spec, const Mesh& mesh);

[[nodiscard]] std::string_view to_string(InitialKind kind) noexcept;

} // namespace pfto
