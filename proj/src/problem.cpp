#include "pfto/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace pfto {

namespace {

constexpr double tag_tol = 1.0e-10;

bool within(double v, double lo, double hi) { return v >= lo - tag_tol && v <= hi + tag_tol; }
bool near(double v, double target) { return std::abs(v - target) <= tag_tol; }

BoundaryRule rule(BoundaryTag tag, std::function<bool(const Vec2&)> applies)
{
    return BoundaryRule{tag, std::move(applies)};
}

BoundaryRule wall_rule()
{
    return rule(BoundaryTag::Wall, [](const Vec2&) { return true; });
}

ProblemSpec left_inflow()
{
    ProblemSpec spec;
    spec.name = "left_inflow";
    spec.domain = Rect{0.0, 1.0, 0.0, 1.0};
    spec.nx = spec.ny = 37;
    spec.boundary = {
        rule(BoundaryTag::Inlet, [](const Vec2& x) { return near(x.x(), 0.0); }),
        rule(BoundaryTag::Outlet, [](const Vec2& x) { return near(x.x(), 1.0) && within(x.y(), 0.3, 0.7); }),
        wall_rule(),
    };
    spec.bc.inlet = [](const Vec2& x) { return Vec2(4.0 * x.y() * (1.0 - x.y()), 0.0); };
    spec.opt.dt = 1.0e-4;
    spec.opt.beta = 0.5;
    return spec;
}

ProblemSpec three_inflows()
{
    ProblemSpec spec;
    spec.name = "three_inflows";
    spec.domain = Rect{0.0, 1.0, 0.0, 1.0};
    spec.nx = spec.ny = 35;
    const auto middle = [](double v) { return within(v, 0.4, 0.6); };
    spec.boundary = {
        rule(BoundaryTag::Inlet, [middle](const Vec2& x) { return near(x.y(), 1.0) && middle(x.x()); }),
        rule(BoundaryTag::Inlet, [middle](const Vec2& x) { return near(x.y(), 0.0) && middle(x.x()); }),
        rule(BoundaryTag::Inlet, [middle](const Vec2& x) { return near(x.x(), 0.0) && middle(x.y()); }),
        rule(BoundaryTag::Outlet, [middle](const Vec2& x) { return near(x.x(), 1.0) && middle(x.y()); }),
        wall_rule(),
    };
    // unit plug flows pointing into the domain
    spec.bc.inlet = [](const Vec2& x) -> Vec2 {
        if (near(x.y(), 1.0)) return {0.0, -1.0};
        if (near(x.y(), 0.0)) return {0.0, 1.0};
        return {1.0, 0.0};
    };
    spec.opt.dt = 5.0e-5;
    spec.opt.beta = 0.36;
    return spec;
}

ProblemSpec bypass()
{
    ProblemSpec spec;
    spec.name = "bypass";
    spec.domain = Rect{0.0, 1.5, -0.5, 0.5};
    spec.nx = 60;
    spec.ny = 40;
    const auto channel = [](double y) { return within(std::abs(y), 0.15, 0.35); };
    spec.boundary = {
        rule(BoundaryTag::Inlet, [channel](const Vec2& x) { return near(x.x(), 0.0) && channel(x.y()); }),
        rule(BoundaryTag::Outlet, [channel](const Vec2& x) { return near(x.x(), 1.5) && channel(x.y()); }),
        wall_rule(),
    };
    spec.bc.inlet = [](const Vec2& x) {
        const double y2 = x.y() * x.y();
        return Vec2(-100.0 * (y2 - 0.35 * 0.35) * (y2 - 0.15 * 0.15), 0.0);
    };
    spec.phys.epsilon = 5.0e-3;
    spec.phys.gamma = 0.1;
    spec.opt.dt = 5.0e-3;
    spec.opt.s_tilde = 1.0;
    spec.opt.zeta0 = 50.0;
    spec.opt.beta = 0.7 / spec.domain.area(); // target volume 0.7
    return spec;
}

std::vector<std::vector<double>> read_mask(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open mask file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> row;
        double v = 0.0;
        while (ls >> v) {
            if (v < 0.0 || v > 1.0) {
                throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": mask value outside [0, 1]");
            }
            row.push_back(v);
        }
        if (!ls.eof()) throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": not a number");
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": ragged mask row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorKind::Config, "mask file '" + path + "' is empty");
    return rows;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"left_inflow", "three_inflows", "bypass"};
}

ProblemSpec preset(std::string_view name)
{
    if (name == "left_inflow") return left_inflow();
    if (name == "three_inflows") return three_inflows();
    if (name == "bypass") return bypass();
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::Config, "unknown preset '" + std::string(name) + "' (available: " + list + ")");
}

Mesh initial_mesh(const ProblemSpec& spec)
{
    return build_rect_mesh(spec.domain, spec.nx, spec.ny, spec.boundary);
}

PhaseField initial_phase(const ProblemSpec& spec, const Mesh& mesh)
{
    switch (spec.initial.kind) {
    case InitialKind::Constant: {
        const double v = spec.initial.value.value_or(spec.opt.beta);
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::Config, "initial_value must be in [0, 1]");
        return PhaseField::constant(mesh, v);
    }
    case InitialKind::Random: {
        std::mt19937_64 rng(spec.initial.seed);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        PhaseField phi{Eigen::VectorXd(mesh.num_vertices())};
        for (int v = 0; v < mesh.num_vertices(); ++v) phi.nodal[v] = dist(rng);
        return phi;
    }
    case InitialKind::Mask: {
        const auto rows = read_mask(spec.initial.mask_path);
        const int nr = static_cast<int>(rows.size());
        const int nc = static_cast<int>(rows.front().size());
        const Rect& d = spec.domain;
        PhaseField phi{Eigen::VectorXd(mesh.num_vertices())};
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const Vec2& x = mesh.vertex(v);
            const int c = std::clamp(static_cast<int>((x.x() - d.x0) / (d.x1 - d.x0) * nc), 0, nc - 1);
            const int r = std::clamp(static_cast<int>((d.y1 - x.y()) / (d.y1 - d.y0) * nr), 0, nr - 1);
            phi.nodal[v] = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        return phi;
    }
    }
    throw Error(ErrorKind::Config, "unknown initial field kind");
}

std::string_view to_string(InitialKind kind) noexcept
{
    switch (kind) {
    case InitialKind::Constant: return "constant";
    case InitialKind::Random: return "random";
    case InitialKind::Mask: return "mask";
    }
    return "?";
}

} // namespace pfto
