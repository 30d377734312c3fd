#pragma once

#include "pfto/adapt.hpp"
#include "pfto/estimator.hpp"
#include "pfto/fespace.hpp"

#include <span>
#include <string>

namespace pfto {

/// Fields written by write_vtk; null entries are skipped.
struct VtkFields {
    const PhaseField* phi = nullptr;
    const VelocityField* u = nullptr; // exported at element centroids
    const PressureField* p = nullptr;
    const Indicators* eta1 = nullptr; // squared indicators per element
    const Indicators* eta2 = nullptr;
};

/// Legacy ASCII VTK 3.0 unstructured grid.
[[nodiscard]] std::string vtk_string(const Mesh& mesh, const VtkFields& fields, const std::string& title = "pfto");
void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::string& path, const std::string& title = "pfto");

inline constexpr const char* csv_header =
    "level,outer,lagrangian,brinkman,dissipation,body,ginzburg_landau,objective,volume_gap,ell,zeta,eta1,eta2,"
    "vertices,seconds";

/// One row per outer iteration; eta columns are filled on the last row of each level only.
[[nodiscard]] std::string csv_string(std::span<const IterationRecord> history);
void write_csv_log(const RunReport& report, const std::string& path);
void write_csv_log(std::span<const IterationRecord> history, const std::string& path);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

} // namespace pfto
