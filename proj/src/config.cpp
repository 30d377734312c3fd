#include "pfto/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pfto {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error(ErrorKind::Config, key + ": expected a number, got '" + value + "'");
    }
    return out;
}

long long to_int(const std::string& key, const std::string& value)
{
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error(ErrorKind::Config, key + ": expected an integer, got '" + value + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw Error(ErrorKind::Config, key + ": expected true or false, got '" + value + "'");
}

struct Line {
    int number;
    std::string key;
    std::string value;
};

std::vector<Line> split_lines(const std::string& text, const std::string& source)
{
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config, source + ":" + std::to_string(n) + ": expected 'key = value'");
        }
        Line l{n, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (l.key.empty() || l.value.empty()) {
            throw Error(ErrorKind::Config, source + ":" + std::to_string(n) + ": expected 'key = value'");
        }
        out.push_back(std::move(l));
    }
    return out;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "preset", "nx", "ny",
        "mu", "alpha_max", "epsilon", "gamma",
        "beta", "dt", "s_tilde", "n_outer", "n_inner", "ell0", "zeta0", "kappa", "implicit_volume",
        "levels", "K", "theta1", "theta2", "strategy", "bisections", "eta_tolerance", "solver",
        "initial", "initial_value", "seed", "mask_path",
    };
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    auto& phys = cfg.spec.phys;
    auto& opt = cfg.spec.opt;
    auto& afem = cfg.afem;
    if (key == "preset") {
        const auto keep = cfg.afem;
        cfg.spec = preset(value);
        cfg.afem = keep;
    } else if (key == "nx") cfg.spec.nx = static_cast<int>(to_int(key, value));
    else if (key == "ny") cfg.spec.ny = static_cast<int>(to_int(key, value));
    else if (key == "mu") phys.mu = to_double(key, value);
    else if (key == "alpha_max") phys.alpha_max = to_double(key, value);
    else if (key == "epsilon") phys.epsilon = to_double(key, value);
    else if (key == "gamma") phys.gamma = to_double(key, value);
    else if (key == "beta") opt.beta = to_double(key, value);
    else if (key == "dt") opt.dt = to_double(key, value);
    else if (key == "s_tilde") opt.s_tilde = to_double(key, value);
    else if (key == "n_outer") opt.n_outer = static_cast<int>(to_int(key, value));
    else if (key == "n_inner") opt.n_inner = static_cast<int>(to_int(key, value));
    else if (key == "ell0") opt.ell0 = to_double(key, value);
    else if (key == "zeta0") opt.zeta0 = to_double(key, value);
    else if (key == "kappa") opt.kappa = to_double(key, value);
    else if (key == "implicit_volume") opt.implicit_volume = to_bool(key, value);
    else if (key == "levels" || key == "K") afem.levels = static_cast<int>(to_int(key, value));
    else if (key == "theta1") afem.theta1 = to_double(key, value);
    else if (key == "theta2") afem.theta2 = to_double(key, value);
    else if (key == "bisections") afem.bisections = static_cast<int>(to_int(key, value));
    else if (key == "eta_tolerance") afem.eta_tolerance = to_double(key, value);
    else if (key == "strategy") {
        if (value == "adaptive") afem.strategy = Strategy::Adaptive;
        else if (value == "uniform") afem.strategy = Strategy::Uniform;
        else throw Error(ErrorKind::Config, "strategy: expected adaptive or uniform, got '" + value + "'");
    } else if (key == "solver") {
        if (value == "direct") afem.solver = LinearSolverKind::Direct;
        else if (value == "sparselu") afem.solver = LinearSolverKind::SparseLU;
        else if (value == "minres") afem.solver = LinearSolverKind::Minres;
        else throw Error(ErrorKind::Config, "solver: expected direct, sparselu or minres, got '" + value + "'");
    } else if (key == "initial") {
        auto& init = cfg.spec.initial;
        if (value == "constant") init.kind = InitialKind::Constant;
        else if (value == "random") init.kind = InitialKind::Random;
        else if (value == "mask") init.kind = InitialKind::Mask;
        else throw Error(ErrorKind::Config, "initial: expected constant, random or mask, got '" + value + "'");
    } else if (key == "initial_value") cfg.spec.initial.value = to_double(key, value);
    else if (key == "seed") {
        const long long s = to_int(key, value);
        if (s < 0) throw Error(ErrorKind::Config, "seed must be >= 0");
        cfg.spec.initial.seed = static_cast<std::uint64_t>(s);
    } else if (key == "mask_path") cfg.spec.initial.mask_path = value;
    else throw Error(ErrorKind::Config, "unknown key '" + key + "'");
}

void validate(const RunConfig& cfg)
{
    if (cfg.spec.nx < 1) throw Error(ErrorKind::Config, "nx must be >= 1");
    if (cfg.spec.ny < 1) throw Error(ErrorKind::Config, "ny must be >= 1");
    validate(cfg.spec.phys);
    validate(cfg.spec.opt);
    validate(cfg.afem);
    const auto& init = cfg.spec.initial;
    if (init.value && !(*init.value >= 0.0 && *init.value <= 1.0)) {
        throw Error(ErrorKind::Config, "initial_value must be in [0, 1]");
    }
    if (init.kind == InitialKind::Mask && init.mask_path.empty()) {
        throw Error(ErrorKind::Config, "mask_path is required when initial = mask");
    }
}

RunConfig parse_config(const std::string& text, const std::string& source)
{
    const auto lines = split_lines(text, source);
    RunConfig cfg{preset("left_inflow"), AfemConfig{}};
    // preset first so that overrides win regardless of their position
    const auto p = std::find_if(lines.begin(), lines.end(), [](const Line& l) { return l.key == "preset"; });
    const auto where = [&](const Line& l) { return source + ":" + std::to_string(l.number) + ": "; };
    if (p != lines.end()) {
        try {
            apply_setting(cfg, p->key, p->value);
        } catch (const Error& err) {
            throw Error(ErrorKind::Config, where(*p) + err.what());
        }
    }
    for (const auto& l : lines) {
        if (l.key == "preset") {
            if (&l != &*p) throw Error(ErrorKind::Config, where(l) + "preset given twice");
            continue;
        }
        try {
            apply_setting(cfg, l.key, l.value);
        } catch (const Error& err) {
            throw Error(ErrorKind::Config, where(l) + err.what());
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

} // namespace pfto
