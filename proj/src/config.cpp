#include "levelmass/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "levelmass/errors.hpp"

namespace levelmass {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::GreenSweep: return "green-sweep";
        case RunMode::PSweep: return "p-sweep";
        case RunMode::Adm: return "adm";
        case RunMode::Penrose: return "penrose";
        case RunMode::Identities: return "identities";
        case RunMode::Fit: return "fit";
        case RunMode::Grid3d: return "grid3d";
        case RunMode::Solve: return "solve";
    }
    return "?";
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "green-sweep") return RunMode::GreenSweep;
    if (s == "p-sweep") return RunMode::PSweep;
    if (s == "adm") return RunMode::Adm;
    if (s == "penrose") return RunMode::Penrose;
    if (s == "identities") return RunMode::Identities;
    if (s == "fit") return RunMode::Fit;
    if (s == "grid3d") return RunMode::Grid3d;
    if (s == "solve") return RunMode::Solve;
    throw ConfigError("unknown run mode '" + s + "'");
}

namespace {

struct RawConfig {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> data;
    std::string origin;

    std::optional<std::string> get(const std::string& sec, const std::string& key) const {
        const auto s = data.find(sec);
        if (s == data.end()) return std::nullopt;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second.first;
    }

    [[noreturn]] void fail(const std::string& sec, const std::string& key,
                           const std::string& why) const {
        int line = 0;
        const auto s = data.find(sec);
        if (s != data.end()) {
            const auto k = s->second.find(key);
            if (k != s->second.end()) line = k->second.second;
        }
        throw ConfigError(origin + (line ? ":" + std::to_string(line) : "") + ": [" +
                          sec + "] " + key + ": " + why);
    }

    double num(const std::string& sec, const std::string& key, double dflt) const {
        const auto v = get(sec, key);
        if (!v) return dflt;
        try {
            std::size_t pos = 0;
            const double x = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return x;
        } catch (const std::exception&) {
            fail(sec, key, "expected a number, got '" + *v + "'");
        }
    }

    int integer(const std::string& sec, const std::string& key, int dflt) const {
        const double x = num(sec, key, dflt);
        const int i = static_cast<int>(x);
        if (static_cast<double>(i) != x) fail(sec, key, "expected an integer");
        return i;
    }

    bool boolean(const std::string& sec, const std::string& key, bool dflt) const {
        const auto v = get(sec, key);
        if (!v) return dflt;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        fail(sec, key, "expected true/false");
    }

    std::vector<double> numbers(const std::string& sec, const std::string& key) const {
        const auto v = get(sec, key);
        std::vector<double> out;
        if (!v) return out;
        std::string s = *v;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream ss(s);
        double x;
        while (ss >> x) out.push_back(x);
        if (!ss.eof()) fail(sec, key, "expected a comma-separated list of numbers");
        return out;
    }
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
    RawConfig raw;
    raw.origin = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string{};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": key outside of any [section]");
        raw.data[section][key] = {val, lineno};
    }
    return raw;
}

MetricKind kind_from_string(const RawConfig& raw, const std::string& s) {
    if (s == "flat") return MetricKind::Flat;
    if (s == "schwarzschild") return MetricKind::SchwarzschildIsotropic;
    if (s == "smoothed_schwarzschild") return MetricKind::SmoothedSchwarzschild;
    if (s == "custom") return MetricKind::CustomRadialConformal;
    raw.fail("metric", "kind", "unknown kind '" + s + "'");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    const RawConfig raw = tokenize(text, origin);
    ExperimentConfig cfg;

    if (const auto k = raw.get("metric", "kind")) cfg.kind = kind_from_string(raw, *k);
    cfg.mass = raw.num("metric", "mass", 0.0);
    cfg.smoothing_a = raw.num("metric", "smoothing_a", 0.0);
    if (raw.get("metric", "inner_radius")) {
        const double r0 = raw.num("metric", "inner_radius", 0.0);
        if (!(r0 > 0.0)) raw.fail("metric", "inner_radius", "must be > 0");
        cfg.inner_radius = r0;
    }
    if (const auto p = raw.get("metric", "profile_path")) cfg.profile_path = *p;
    if (cfg.kind == MetricKind::CustomRadialConformal && cfg.profile_path.empty())
        raw.fail("metric", "profile_path", "required for kind = custom");

    cfg.radial_n = raw.integer("solver", "radial_n", cfg.radial_n);
    cfg.r_min = raw.num("solver", "r_min", 0.0);
    cfg.r_max = raw.num("solver", "r_max", 0.0);
    cfg.quad_tol = raw.num("solver", "quad_tol", cfg.quad_tol);
    cfg.exterior = raw.boolean("solver", "exterior", false);
    cfg.force_numeric = raw.boolean("solver", "force_numeric", false);
    cfg.box_L = raw.num("solver", "box_L", cfg.box_L);
    cfg.box_N = raw.integer("solver", "box_N", cfg.box_N);
    if (raw.get("solver", "pole")) {
        const auto p = raw.numbers("solver", "pole");
        if (p.size() != 3) raw.fail("solver", "pole", "expected three coordinates");
        cfg.pole = {p[0], p[1], p[2]};
    }
    cfg.cg_tol = raw.num("solver", "cg_tol", cfg.cg_tol);
    cfg.cg_max_iters = raw.integer("solver", "cg_max_iters", cfg.cg_max_iters);

    if (const auto m = raw.get("run", "mode")) cfg.mode = run_mode_from_string(*m);
    else raw.fail("run", "mode", "missing (exactly one mode per run)");
    cfg.p_list = raw.numbers("run", "p_list");
    for (double p : cfg.p_list)
        if (!(p > 1.0 && p < 3.0)) raw.fail("run", "p_list", "every p must lie in (1,3)");
    cfg.t_min = raw.num("run", "t_min", 0.0);
    cfg.t_max = raw.num("run", "t_max", 0.0);
    cfg.t_count = raw.integer("run", "t_count", cfg.t_count);
    if (cfg.t_count < 2) raw.fail("run", "t_count", "need at least 2");
    cfg.radii = raw.numbers("run", "radii");
    cfg.n_points = raw.integer("run", "n_points", cfg.n_points);
    cfg.mono_tol = raw.num("run", "mono_tol", cfg.mono_tol);
    cfg.grid3d_mono_tol = raw.num("run", "grid3d_mono_tol", 0.0);
    cfg.compare_radial = raw.boolean("run", "compare_radial", true);
    cfg.convergence_N = raw.integer("run", "convergence_N", 0);
    cfg.spot_t = raw.numbers("run", "spot_t");
    cfg.spot_F = raw.numbers("run", "spot_F");
    cfg.spot_tol = raw.numbers("run", "spot_tol");
    if (cfg.spot_t.size() != cfg.spot_F.size() || cfg.spot_t.size() != cfg.spot_tol.size())
        raw.fail("run", "spot_t", "spot_t, spot_F, spot_tol need matching lengths");
    cfg.expected_c_p = raw.numbers("run", "expected_c_p");
    cfg.expected_beta = raw.numbers("run", "expected_beta");
    cfg.expected_cap = raw.numbers("run", "expected_cap");
    cfg.expected_tol = raw.num("run", "expected_tol", cfg.expected_tol);
    cfg.deriv_points = raw.integer("run", "deriv_points", cfg.deriv_points);
    cfg.deriv_tol = raw.num("run", "deriv_tol", cfg.deriv_tol);

    if (const auto d = raw.get("output", "dir")) cfg.out_dir = *d;
    if (const auto f = raw.get("output", "formats")) {
        cfg.write_csv = f->find("csv") != std::string::npos;
        cfg.write_summary = f->find("summary") != std::string::npos;
        cfg.write_mesh = f->find("mesh") != std::string::npos;
        cfg.write_fields = f->find("fields") != std::string::npos;
    }

    // mode-specific validation, before any solve
    if (cfg.mode == RunMode::PSweep && cfg.p_list.empty())
        raw.fail("run", "p_list", "p-sweep needs a nonempty p list");
    if (cfg.mode == RunMode::Penrose && cfg.p_list.empty())
        raw.fail("run", "p_list", "penrose needs a nonempty p list");
    if ((cfg.mode == RunMode::PSweep || cfg.mode == RunMode::Penrose) &&
        !cfg.inner_radius)
        raw.fail("metric", "inner_radius", "capacitary runs need inner_radius");
    if (cfg.mode == RunMode::Identities && !cfg.p_list.empty() && !cfg.inner_radius)
        raw.fail("metric", "inner_radius",
                 "identities with a p list checks capacitary derivatives and "
                 "needs inner_radius");
    if (!cfg.profile_path.empty() &&
        cfg.kind == MetricKind::CustomRadialConformal &&
        !std::filesystem::exists(cfg.profile_path))
        raw.fail("metric", "profile_path", "file does not exist: " + cfg.profile_path);
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

MetricModel ExperimentConfig::make_model() const {
    switch (kind) {
        case MetricKind::Flat: return MetricModel::flat(inner_radius);
        case MetricKind::SchwarzschildIsotropic:
            return MetricModel::schwarzschild(mass, inner_radius);
        case MetricKind::SmoothedSchwarzschild:
            return MetricModel::smoothed_schwarzschild(mass, smoothing_a, inner_radius);
        case MetricKind::CustomRadialConformal:
            return MetricModel::custom_from_file(profile_path, inner_radius);
    }
    throw ConfigError("unhandled metric kind");
}

} // namespace levelmass
