#include "pfto/compare.hpp"
#include "pfto/config.hpp"
#include "pfto/io.hpp"
#include "pfto/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pfto;

namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrixXd vertex_array(const Mesh& mesh)
{
    RowMatrixXd out(mesh.num_vertices(), 2);
    for (int v = 0; v < mesh.num_vertices(); ++v) out.row(v) = mesh.vertex(v).transpose();
    return out;
}

RowMatrixXi element_array(const Mesh& mesh)
{
    RowMatrixXi out(mesh.num_elements(), 3);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        for (int i = 0; i < 3; ++i) out(t, i) = mesh.element(t)[static_cast<std::size_t>(i)];
    }
    return out;
}

PhaseField phase(const Mesh& mesh, const Eigen::VectorXd& phi)
{
    if (phi.size() != mesh.num_vertices()) throw Error(ErrorKind::Config, "phi needs one value per vertex");
    return PhaseField{phi};
}

VelocityField velocity(const Mesh& mesh, const Eigen::VectorXd& u)
{
    if (u.size() != 2 * mesh.num_edges()) throw Error(ErrorKind::Config, "u needs two values per edge");
    return VelocityField{u};
}

Eigen::VectorXd squares(const Indicators& ind)
{
    return Eigen::Map<const Eigen::VectorXd>(ind.eta_sq.data(), static_cast<Eigen::Index>(ind.eta_sq.size()));
}

py::dict terms_dict(const ObjectiveTerms& t)
{
    py::dict d;
    d["brinkman"] = t.brinkman;
    d["dissipation"] = t.dissipation;
    d["body"] = t.body;
    d["ginzburg_landau"] = t.ginzburg_landau;
    d["total"] = t.total();
    return d;
}

py::dict record_dict(const IterationRecord& r)
{
    py::dict d;
    d["level"] = r.level;
    d["outer"] = r.outer;
    d["lagrangian"] = r.lagrangian;
    d["objective"] = r.terms.total();
    d["terms"] = terms_dict(r.terms);
    d["volume_gap"] = r.volume_gap;
    d["ell"] = r.ell;
    d["zeta"] = r.zeta;
    d["eta1"] = r.eta1 ? py::object(py::float_(*r.eta1)) : py::none();
    d["eta2"] = r.eta2 ? py::object(py::float_(*r.eta2)) : py::none();
    d["vertices"] = r.vertices;
    d["seconds"] = r.seconds;
    return d;
}

py::dict level_dict(const LevelRecord& r)
{
    py::dict d;
    d["level"] = r.level;
    d["vertices"] = r.vertices;
    d["elements"] = r.elements;
    d["eta1"] = r.eta1;
    d["eta2"] = r.eta2;
    d["objective"] = r.terms.total();
    d["terms"] = terms_dict(r.terms);
    d["lagrangian"] = r.lagrangian;
    d["volume_gap"] = r.volume_gap;
    d["seconds"] = r.seconds;
    d["marked"] = r.marked;
    d["interface_fraction"] = r.interface_fraction ? py::object(py::float_(*r.interface_fraction)) : py::none();
    return d;
}

Strategy parse_strategy(const std::string& s)
{
    if (s == "adaptive") return Strategy::Adaptive;
    if (s == "uniform") return Strategy::Uniform;
    throw Error(ErrorKind::Config, "strategy: expected adaptive or uniform, got '" + s + "'");
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Adaptive phase-field topology optimization for Stokes-Brinkman flow";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error)(e.what());
            inst.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error.ptr(), inst.ptr());
        }
    });

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("vertices", &vertex_array, "Vertex coordinates, shape (n, 2)")
        .def_property_readonly("elements", &element_array, "Vertex ids per triangle, newest vertex first")
        .def_property_readonly("num_vertices", &Mesh::num_vertices)
        .def_property_readonly("num_elements", &Mesh::num_elements)
        .def_property_readonly("num_edges", &Mesh::num_edges)
        .def_property_readonly("total_area", &Mesh::total_area)
        .def("area", &Mesh::area, py::arg("t"))
        .def("min_angle", &Mesh::min_angle)
        .def("element_parent", &Mesh::element_parent, py::arg("t"))
        .def("__repr__", [](const Mesh& mesh) {
            return "<Mesh vertices=" + std::to_string(mesh.num_vertices())
                + " elements=" + std::to_string(mesh.num_elements()) + ">";
        });

    m.def("unit_square", [](int nx, int ny) {
        return build_rect_mesh(Rect{}, nx, ny, {{BoundaryTag::Wall, [](const Vec2&) { return true; }}});
    }, py::arg("nx"), py::arg("ny"), "Unit square split into nx x ny cells, all walls");
    m.def("uniform_refine", &uniform_refine, py::arg("mesh"));
    m.def("bisect", [](const Mesh& mesh, std::vector<int> marked, int rounds) {
        return bisect(mesh, make_marked_set(std::move(marked)), rounds);
    }, py::arg("mesh"), py::arg("marked"), py::arg("rounds") = 1);
    m.def("prolongate", [](const Mesh& parent, const Mesh& child, const Eigen::VectorXd& phi) {
        return p1_prolongate(parent, child, phase(parent, phi)).nodal;
    }, py::arg("parent"), py::arg("child"), py::arg("phi"));

    py::class_<PhysParams>(m, "PhysParams")
        .def(py::init<>())
        .def_readwrite("mu", &PhysParams::mu)
        .def_readwrite("alpha_max", &PhysParams::alpha_max)
        .def_readwrite("epsilon", &PhysParams::epsilon)
        .def_readwrite("gamma", &PhysParams::gamma);

    py::class_<OptParams>(m, "OptParams")
        .def(py::init<>())
        .def_readwrite("beta", &OptParams::beta)
        .def_readwrite("dt", &OptParams::dt)
        .def_readwrite("s_tilde", &OptParams::s_tilde)
        .def_readwrite("n_outer", &OptParams::n_outer)
        .def_readwrite("n_inner", &OptParams::n_inner)
        .def_readwrite("ell0", &OptParams::ell0)
        .def_readwrite("zeta0", &OptParams::zeta0)
        .def_readwrite("kappa", &OptParams::kappa)
        .def_readwrite("implicit_volume", &OptParams::implicit_volume);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("name", &ProblemSpec::name)
        .def_readwrite("nx", &ProblemSpec::nx)
        .def_readwrite("ny", &ProblemSpec::ny)
        .def_readwrite("phys", &ProblemSpec::phys)
        .def_readwrite("opt", &ProblemSpec::opt)
        .def_property_readonly("domain", [](const ProblemSpec& s) {
            return std::array<double, 4>{s.domain.x0, s.domain.x1, s.domain.y0, s.domain.y1};
        })
        .def("set_random_initial", [](ProblemSpec& s, std::uint64_t seed) {
            s.initial.kind = InitialKind::Random;
            s.initial.seed = seed;
        }, py::arg("seed"))
        .def("set_constant_initial", [](ProblemSpec& s, std::optional<double> value) {
            s.initial.kind = InitialKind::Constant;
            s.initial.value = value;
        }, py::arg("value") = py::none());

    py::class_<AfemConfig>(m, "AfemConfig")
        .def(py::init<>())
        .def_readwrite("levels", &AfemConfig::levels)
        .def_readwrite("theta1", &AfemConfig::theta1)
        .def_readwrite("theta2", &AfemConfig::theta2)
        .def_readwrite("bisections", &AfemConfig::bisections)
        .def_readwrite("eta_tolerance", &AfemConfig::eta_tolerance)
        .def_property("strategy", [](const AfemConfig& c) { return std::string(to_string(c.strategy)); },
                      [](AfemConfig& c, const std::string& s) { c.strategy = parse_strategy(s); });

    py::class_<RunConfig>(m, "RunConfig")
        .def_readwrite("spec", &RunConfig::spec)
        .def_readwrite("afem", &RunConfig::afem);

    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name) { return preset(name); }, py::arg("name"));
    m.def("parse_config", &parse_config, py::arg("text"), py::arg("source") = "<config>");
    m.def("load_config", &load_config, py::arg("path"));
    m.def("initial_mesh", &initial_mesh, py::arg("spec"));
    m.def("initial_phase", [](const ProblemSpec& spec, const Mesh& mesh) { return initial_phase(spec, mesh).nodal; },
          py::arg("spec"), py::arg("mesh"));

    m.def("solve_state", [](const ProblemSpec& spec, const Mesh& mesh, const Eigen::VectorXd& phi) {
        const StateSolution sol = solve_state(assemble(mesh, phase(mesh, phi), spec.phys, spec.bc));
        return py::make_tuple(sol.u.dofs, sol.p.cell);
    }, py::arg("spec"), py::arg("mesh"), py::arg("phi"),
       "CR velocity (component-blocked, two values per edge) and P0 pressure");
    m.def("objective", [](const ProblemSpec& spec, const Mesh& mesh, const Eigen::VectorXd& phi,
                          const Eigen::VectorXd& u) {
        return terms_dict(objective(mesh, phase(mesh, phi), velocity(mesh, u), spec.phys));
    }, py::arg("spec"), py::arg("mesh"), py::arg("phi"), py::arg("u"));
    m.def("volume_gap", [](const Mesh& mesh, const Eigen::VectorXd& phi, double beta) {
        return volume_gap(phase(mesh, phi), beta, mesh);
    }, py::arg("mesh"), py::arg("phi"), py::arg("beta"));
    m.def("eta1", [](const ProblemSpec& spec, const Mesh& mesh, const Eigen::VectorXd& phi, const Eigen::VectorXd& u) {
        return squares(eta1(mesh, phase(mesh, phi), velocity(mesh, u), spec.phys));
    }, py::arg("spec"), py::arg("mesh"), py::arg("phi"), py::arg("u"), "Squared indicators per element");
    m.def("eta2", [](const ProblemSpec& spec, const Mesh& mesh, const Eigen::VectorXd& phi, const Eigen::VectorXd& u) {
        return squares(eta2(mesh, phase(mesh, phi), velocity(mesh, u), spec.phys, spec.bc));
    }, py::arg("spec"), py::arg("mesh"), py::arg("phi"), py::arg("u"), "Squared indicators per element");
    m.def("doerfler_mark", [](const std::vector<double>& values, double theta) {
        return doerfler_mark(values, theta).element_ids;
    }, py::arg("indicator_sq"), py::arg("theta"));

    m.def("optimize", [](const ProblemSpec& spec, const Mesh& mesh, const Eigen::VectorXd& phi) {
        OptimizeResult res = [&] {
            py::gil_scoped_release release;
            return optimize_on_mesh(mesh, phase(mesh, phi), OptState::initial(spec.opt), spec.phys, spec.opt, spec.bc);
        }();
        py::dict d;
        d["phi"] = res.phi.nodal;
        d["u"] = res.u.dofs;
        d["p"] = res.p.cell;
        d["ell"] = res.state.ell;
        d["zeta"] = res.state.zeta;
        py::list history;
        for (const auto& rec : res.state.history) history.append(record_dict(rec));
        d["history"] = history;
        return d;
    }, py::arg("spec"), py::arg("mesh"), py::arg("phi"), "Outer augmented-Lagrangian loop on a fixed mesh");

    py::class_<RunReport>(m, "RunReport")
        .def_property_readonly("levels", [](const RunReport& r) {
            py::list out;
            for (const auto& l : r.levels) out.append(level_dict(l));
            return out;
        })
        .def_property_readonly("history", [](const RunReport& r) {
            py::list out;
            for (const auto& rec : r.state.history) out.append(record_dict(rec));
            return out;
        })
        .def_readonly("mesh", &RunReport::mesh)
        .def_property_readonly("phi", [](const RunReport& r) { return r.phi.nodal; })
        .def_property_readonly("u", [](const RunReport& r) { return r.u.dofs; })
        .def_property_readonly("p", [](const RunReport& r) { return r.p.cell; })
        .def_property_readonly("eta1", [](const RunReport& r) { return squares(r.eta1); })
        .def_property_readonly("eta2", [](const RunReport& r) { return squares(r.eta2); })
        .def("history_csv", [](const RunReport& r) { return csv_string(r.state.history); })
        .def("vtk", [](const RunReport& r) {
            return vtk_string(r.mesh, VtkFields{&r.phi, &r.u, &r.p, &r.eta1, &r.eta2});
        });

    m.def("afem_drive", [](const ProblemSpec& spec, const AfemConfig& cfg) {
        py::gil_scoped_release release;
        return afem_drive(spec, cfg);
    }, py::arg("spec"), py::arg("config"));
    m.def("compare", [](const ProblemSpec& spec, const AfemConfig& adaptive, const AfemConfig& uniform) {
        const CompareResult res = [&] {
            py::gil_scoped_release release;
            return compare_mode(spec, adaptive, uniform);
        }();
        py::list rows;
        for (const auto* row : {&res.adaptive, &res.uniform}) {
            py::dict d;
            d["arm"] = row->arm;
            d["vertices"] = row->vertices;
            d["objective"] = row->objective;
            d["lagrangian"] = row->lagrangian;
            d["volume_gap"] = row->volume_gap;
            d["seconds"] = row->seconds;
            rows.append(d);
        }
        return rows;
    }, py::arg("spec"), py::arg("adaptive"), py::arg("uniform"));

    m.def("manufactured_study", [](int n0, int levels) {
        const ConvergenceStudy s = manufactured_study(n0, levels);
        py::dict d;
        d["energy_rate"] = s.energy_rate;
        d["l2_rate"] = s.l2_rate;
        d["eta2_rate"] = s.eta2_rate;
        py::list rows;
        for (const auto& l : s.levels) {
            py::dict r;
            r["elements"] = l.elements;
            r["h"] = l.h;
            r["energy_error"] = l.energy_error;
            r["l2_error"] = l.l2_error;
            r["max_divergence"] = l.max_divergence;
            r["eta2"] = l.eta2;
            rows.append(r);
        }
        d["levels"] = rows;
        return d;
    }, py::arg("n0") = 8, py::arg("levels") = 4);

    m.def("vtk_string", [](const Mesh& mesh, std::optional<Eigen::VectorXd> phi, const std::string& title) {
        std::optional<PhaseField> field;
        if (phi) field = phase(mesh, *phi);
        return vtk_string(mesh, VtkFields{field ? &*field : nullptr}, title);
    }, py::arg("mesh"), py::arg("phi") = py::none(), py::arg("title") = "pfto");
}
