#include "pfto/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace pfto {

std::string_view to_string(Strategy s) noexcept
{
    return s == Strategy::Adaptive ? "adaptive" : "uniform";
}

void validate(const AfemConfig& cfg)
{
    if (cfg.levels < 1) throw Error(ErrorKind::Config, "levels must be >= 1");
    if (!(cfg.theta1 > 0.0 && cfg.theta1 <= 1.0)) throw Error(ErrorKind::Config, "theta1 must be in (0, 1]");
    if (!(cfg.theta2 > 0.0 && cfg.theta2 <= 1.0)) throw Error(ErrorKind::Config, "theta2 must be in (0, 1]");
    if (cfg.bisections < 1) throw Error(ErrorKind::Config, "bisections must be >= 1");
    if (cfg.eta_tolerance && !(*cfg.eta_tolerance > 0.0)) throw Error(ErrorKind::Config, "eta_tolerance must be > 0");
}

MarkedSet doerfler_mark(std::span<const double> indicator_sq, double theta)
{
    if (indicator_sq.empty()) throw Error(ErrorKind::Config, "cannot mark an empty mesh");
    if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorKind::Config, "theta must be in (0, 1]");
    double total = 0.0;
    for (double v : indicator_sq) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::Config, "indicators must be finite and >= 0");
        total += v;
    }
    if (total == 0.0) return MarkedSet{{0}};

    std::vector<int> order(indicator_sq.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return indicator_sq[static_cast<std::size_t>(a)] > indicator_sq[static_cast<std::size_t>(b)];
    });

    const double goal = theta * total;
    std::vector<int> ids;
    double sum = 0.0;
    for (int t : order) {
        if (sum >= goal) break;
        const double v = indicator_sq[static_cast<std::size_t>(t)];
        if (v == 0.0) break; // only reachable through rounding when theta = 1
        ids.push_back(t);
        sum += v;
    }
    return make_marked_set(std::move(ids));
}

MarkedSet combined_mark(const Indicators& eta1, const Indicators& eta2, const AfemConfig& cfg)
{
    if (eta1.eta_sq.size() != eta2.eta_sq.size()) throw Error(ErrorKind::Config, "indicator sizes differ");
    auto ids = doerfler_mark(eta1.eta_sq, cfg.theta1).element_ids;
    const auto second = doerfler_mark(eta2.eta_sq, cfg.theta2).element_ids;
    ids.insert(ids.end(), second.begin(), second.end());
    return make_marked_set(std::move(ids));
}

double interface_fraction(const Mesh& mesh, const PhaseField& phi, const MarkedSet& marked, double lo, double hi)
{
    if (marked.empty()) return 0.0;
    int hits = 0;
    for (int t : marked.element_ids) {
        const auto& tri = mesh.element(t);
        const bool touches = std::any_of(tri.begin(), tri.end(), [&](int v) {
            return phi.nodal[v] > lo && phi.nodal[v] < hi;
        });
        if (touches) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(marked.size());
}

RunReport afem_drive(const ProblemSpec& spec, const AfemConfig& cfg, const LevelCallback& on_level)
{
    validate(cfg);
    validate(spec.phys);
    validate(spec.opt);

    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.state = OptState::initial(spec.opt);
    try {
        Mesh mesh = initial_mesh(spec);
        PhaseField phi = initial_phase(spec, mesh);
        for (int k = 0; k < cfg.levels; ++k) {
            OptimizeOptions options;
            options.level = k;
            options.solver = cfg.solver;
            options.start = start;
            OptimizeResult res;
            try {
                res = optimize_on_mesh(mesh, phi, report.state, spec.phys, spec.opt, spec.bc, options);
            } catch (const OptimizeError& err) {
                report.state = err.partial_state();
                throw;
            }
            report.state = std::move(res.state);

            Indicators i1 = eta1(mesh, res.phi, res.u, spec.phys);
            Indicators i2 = eta2(mesh, res.phi, res.u, spec.phys, spec.bc);
            IterationRecord& last = report.state.history.back();
            last.eta1 = i1.global;
            last.eta2 = i2.global;

            LevelRecord rec;
            rec.level = k;
            rec.vertices = mesh.num_vertices();
            rec.elements = mesh.num_elements();
            rec.eta1 = i1.global;
            rec.eta2 = i2.global;
            rec.terms = last.terms;
            rec.lagrangian = last.lagrangian;
            rec.volume_gap = last.volume_gap;

            const bool converged = cfg.eta_tolerance && i1.global <= *cfg.eta_tolerance
                && i2.global <= *cfg.eta_tolerance;
            const bool refine = k + 1 < cfg.levels && !converged;
            Mesh next;
            if (refine) {
                if (cfg.strategy == Strategy::Adaptive) {
                    const MarkedSet marked = combined_mark(i1, i2, cfg);
                    rec.marked = static_cast<int>(marked.size());
                    rec.interface_fraction = interface_fraction(mesh, res.phi, marked);
                    next = bisect(mesh, marked, cfg.bisections);
                } else {
                    rec.marked = mesh.num_elements();
                    next = uniform_refine(mesh);
                }
            }
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            report.levels.push_back(rec);

            if (on_level) on_level(LevelSnapshot{mesh, res.phi, res.u, res.p, i1, i2, report.levels.back()});

            if (!refine) {
                report.mesh = std::move(mesh);
                report.phi = std::move(res.phi);
                report.u = std::move(res.u);
                report.p = std::move(res.p);
                report.eta1 = std::move(i1);
                report.eta2 = std::move(i2);
                break;
            }
            phi = p1_prolongate(mesh, next, res.phi);
            mesh = std::move(next);
        }
    } catch (const Error& err) {
        throw AfemError(err, std::move(report));
    }
    return report;
}

} // namespace pfto
