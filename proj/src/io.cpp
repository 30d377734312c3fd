#include "pfto/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pfto {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_size(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) throw Error(ErrorKind::Io, std::string(what) + " does not match the mesh");
}

void cell_scalars(std::ostringstream& out, const char* name, const std::vector<double>& values)
{
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) out << num(v) << '\n';
}

} // namespace

std::string vtk_string(const Mesh& mesh, const VtkFields& fields, const std::string& title)
{
    const int nv = mesh.num_vertices();
    const int nt = mesh.num_elements();
    std::ostringstream out;
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& x : mesh.vertices()) out << num(x.x()) << ' ' << num(x.y()) << " 0\n";
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& tri : mesh.elements()) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    out << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) out << "5\n";

    if (fields.phi) {
        check_size(static_cast<std::size_t>(fields.phi->nodal.size()), static_cast<std::size_t>(nv), "phi");
        out << "POINT_DATA " << nv << "\nSCALARS phi double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v) out << num(fields.phi->nodal[v]) << '\n';
    }
    if (fields.u || fields.p || fields.eta1 || fields.eta2) {
        out << "CELL_DATA " << nt << '\n';
        if (fields.u) {
            check_size(static_cast<std::size_t>(fields.u->dofs.size()), 2 * static_cast<std::size_t>(mesh.num_edges()),
                       "velocity");
            out << "VECTORS velocity double\n";
            const std::array<double, 3> centre{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
            for (int t = 0; t < nt; ++t) {
                const Vec2 c = cr_value(mesh, *fields.u, t, centre);
                out << num(c.x()) << ' ' << num(c.y()) << " 0\n";
            }
        }
        if (fields.p) {
            check_size(static_cast<std::size_t>(fields.p->cell.size()), static_cast<std::size_t>(nt), "pressure");
            out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
            for (int t = 0; t < nt; ++t) out << num(fields.p->cell[t]) << '\n';
        }
        if (fields.eta1) {
            check_size(fields.eta1->eta_sq.size(), static_cast<std::size_t>(nt), "eta1");
            cell_scalars(out, "eta1_sq", fields.eta1->eta_sq);
        }
        if (fields.eta2) {
            check_size(fields.eta2->eta_sq.size(), static_cast<std::size_t>(nt), "eta2");
            cell_scalars(out, "eta2_sq", fields.eta2->eta_sq);
        }
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::string& path, const std::string& title)
{
    write_text_file(path, vtk_string(mesh, fields, title));
}

std::string csv_string(std::span<const IterationRecord> history)
{
    std::ostringstream out;
    out << csv_header << '\n';
    for (const auto& r : history) {
        out << r.level << ',' << r.outer << ',' << num(r.lagrangian) << ',' << num(r.terms.brinkman) << ','
            << num(r.terms.dissipation) << ',' << num(r.terms.body) << ',' << num(r.terms.ginzburg_landau) << ','
            << num(r.terms.total()) << ',' << num(r.volume_gap) << ',' << num(r.ell) << ',' << num(r.zeta) << ','
            << (r.eta1 ? num(*r.eta1) : "") << ',' << (r.eta2 ? num(*r.eta2) : "") << ',' << r.vertices << ','
            << num(r.seconds) << '\n';
    }
    return out.str();
}

void write_csv_log(std::span<const IterationRecord> history, const std::string& path)
{
    if (history.empty()) throw Error(ErrorKind::Io, "empty history, nothing to log");
    write_text_file(path, csv_string(history));
}

void write_csv_log(const RunReport& report, const std::string& path)
{
    write_csv_log(report.state.history, path);
}

} // namespace pfto
