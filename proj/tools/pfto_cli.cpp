#include "pfto/compare.hpp"
#include "pfto/config.hpp"
#include "pfto/io.hpp"
#include "pfto/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

struct CommonOptions {
    std::string preset;
    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> levels;
    std::string strategy;
    std::vector<std::string> overrides;
    bool vtk = true;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--preset", o.preset, "Benchmark preset (left_inflow, three_inflows, bypass)");
    cmd->add_option("--config", o.config, "Key-value config file");
    cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Seed for a random initial phase field (implies initial = random)");
    cmd->add_option("--levels", o.levels, "Number of mesh levels K");
    cmd->add_option("--strategy", o.strategy, "adaptive or uniform")->check(CLI::IsMember({"adaptive", "uniform"}));
    cmd->add_option("--set", o.overrides, "Extra key=value override, repeatable");
    cmd->add_flag("!--no-vtk", o.vtk, "Skip VTK output");
}

pfto::RunConfig resolve(const CommonOptions& o)
{
    pfto::RunConfig cfg = o.config.empty() ? pfto::parse_config("", "<defaults>") : pfto::load_config(o.config);
    if (!o.preset.empty()) {
        if (!o.config.empty()) throw pfto::Error(pfto::ErrorKind::Config, "--preset and --config are exclusive");
        pfto::apply_setting(cfg, "preset", o.preset);
    }
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw pfto::Error(pfto::ErrorKind::Config, "--set expects key=value: " + kv);
        pfto::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed) {
        cfg.spec.initial.kind = pfto::InitialKind::Random;
        cfg.spec.initial.seed = *o.seed;
    }
    if (o.levels) cfg.afem.levels = *o.levels;
    if (!o.strategy.empty()) pfto::apply_setting(cfg, "strategy", o.strategy);
    pfto::validate(cfg);
    return cfg;
}

pfto::LevelCallback level_writer(const CommonOptions& o, const std::string& prefix)
{
    return [&o, prefix](const pfto::LevelSnapshot& s) {
        const auto& r = s.record;
        std::printf("%s level %d: vertices %d  J %.6f  L %.6f  W %.3e  eta1 %.4e  eta2 %.4e  marked %d  %.1fs\n",
                    prefix.c_str(), r.level, r.vertices, r.terms.total(), r.lagrangian, r.volume_gap, r.eta1, r.eta2,
                    r.marked, r.seconds);
        std::fflush(stdout);
        if (!o.vtk) return;
        const pfto::VtkFields fields{&s.phi, &s.u, &s.p, &s.eta1, &s.eta2};
        const auto path = std::filesystem::path(o.out_dir) / (prefix + "_level" + std::to_string(r.level) + ".vtk");
        pfto::write_vtk(s.mesh, fields, path.string(), prefix + " level " + std::to_string(r.level));
    };
}

int run(const CommonOptions& o)
{
    const auto cfg = resolve(o);
    const std::string prefix(pfto::to_string(cfg.afem.strategy));
    const auto report = pfto::afem_drive(cfg.spec, cfg.afem, level_writer(o, prefix));
    pfto::write_csv_log(report, (std::filesystem::path(o.out_dir) / "history.csv").string());
    const auto& last = report.final_level();
    std::printf("final: vertices %d  objective %.6f  volume_gap %.3e  seconds %.1f\n", last.vertices,
                last.terms.total(), last.volume_gap, last.seconds);
    return 0;
}

int compare(const CommonOptions& o, int uniform_levels)
{
    const auto cfg = resolve(o);
    pfto::AfemConfig adaptive = cfg.afem;
    adaptive.strategy = pfto::Strategy::Adaptive;
    pfto::AfemConfig uniform = cfg.afem;
    uniform.levels = uniform_levels;
    const auto res = pfto::compare_mode(cfg.spec, adaptive, uniform,
                                        [&o](const std::string& arm, const pfto::LevelSnapshot& s) {
                                            level_writer(o, arm)(s);
                                        });
    const std::filesystem::path dir(o.out_dir);
    pfto::write_csv_log(res.adaptive_report, (dir / "adaptive_history.csv").string());
    pfto::write_csv_log(res.uniform_report, (dir / "uniform_history.csv").string());
    pfto::write_text_file((dir / "compare.csv").string(), pfto::table_csv(res));
    std::cout << pfto::format_table(res);
    return 0;
}

int verify(int n0, int levels)
{
    const auto study = pfto::manufactured_study(n0, levels);
    std::printf("%10s %10s %14s %14s %14s %12s\n", "elements", "h", "energy_err", "l2_err", "eta2", "max_div");
    for (const auto& l : study.levels) {
        std::printf("%10d %10.5f %14.6e %14.6e %14.6e %12.3e\n", l.elements, l.h, l.energy_error, l.l2_error, l.eta2,
                    l.max_divergence);
    }
    std::printf("rates: energy %.3f  l2 %.3f  eta2 %.3f\n", study.energy_rate, study.l2_rate, study.eta2_rate);
    const bool ok = std::abs(study.energy_rate - 1.0) <= 0.15 && std::abs(study.l2_rate - 2.0) <= 0.15;
    std::printf("%s\n", ok ? "verify: ok" : "verify: rates out of range");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive phase-field topology optimization for Stokes-Brinkman flow"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Run one refinement strategy");
    add_common(run_cmd, run_opts);

    CommonOptions cmp_opts;
    int uniform_levels = 3;
    auto* cmp_cmd = app.add_subcommand("compare", "Adaptive against uniform refinement");
    add_common(cmp_cmd, cmp_opts);
    cmp_cmd->add_option("--uniform-levels", uniform_levels, "Levels of the uniform arm")->capture_default_str();

    int n0 = 8;
    int verify_levels = 4;
    auto* verify_cmd = app.add_subcommand("verify", "Manufactured-solution convergence check");
    verify_cmd->add_option("--n0", n0, "Cells per side on the coarsest mesh")->capture_default_str();
    verify_cmd->add_option("--levels", verify_levels, "Number of meshes")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(run_opts);
        if (*cmp_cmd) return compare(cmp_opts, uniform_levels);
        if (*verify_cmd) return verify(n0, verify_levels);
    } catch (const pfto::Error& err) {
        std::fprintf(stderr, "error kind=%s message=\"%s\"\n", std::string(pfto::to_string(err.kind())).c_str(),
                     err.what());
        return err.kind() == pfto::ErrorKind::Config ? 2 : 1;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error kind=internal message=\"%s\"\n", err.what());
        return 1;
    }
    return 0;
}
