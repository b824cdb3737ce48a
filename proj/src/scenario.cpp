#include "qgauss/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qgauss/hydro.hpp"
#include "qgauss/schrodinger.hpp"
#include "qgauss/states.hpp"
#include "qgauss/surface.hpp"

namespace qgauss {

const char* kind_label(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::free_packet: return "free_packet";
        case ScenarioKind::harmonic: return "harmonic";
        case ScenarioKind::damped_harmonic: return "damped_harmonic";
        case ScenarioKind::sphere: return "sphere";
        case ScenarioKind::custom_potential: return "custom_potential";
        case ScenarioKind::verify_constraint: return "verify_constraint";
        case ScenarioKind::compare_solvers: return "compare_solvers";
    }
    return "?";
}

std::vector<std::pair<ScenarioKind, std::string>> scenario_catalogue() {
    return {
        {ScenarioKind::free_packet, "free Gaussian spreading under the quantum force (hydro solver)"},
        {ScenarioKind::harmonic, "coherent state in a harmonic trap, energy and <x> checks (hydro solver)"},
        {ScenarioKind::damped_harmonic, "friction-damped coherent state: hydro solver and nonlinear wave reference"},
        {ScenarioKind::sphere, "free motion on a sphere in the spherical-harmonic basis"},
        {ScenarioKind::custom_potential, "Gaussian in a polynomial potential, hydro vs split-step"},
        {ScenarioKind::verify_constraint, "random-perturbation certificate for the acceleration minimizer"},
        {ScenarioKind::compare_solvers, "hydro solver against split-step and Crank-Nicolson references"},
    };
}

// ---------------------------------------------------------------- config

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "name", "kind", "hbar", "m", "omega0", "gamma", "R", "sigma0", "k0", "x0",
        "n", "x_min", "length", "dt", "oracle_dt", "t_end", "sample_every", "seed", "lmax",
        "trials", "epsilon", "state", "potential", "potential_coeffs", "sphere_modes", "include_quantum",
    };
    return keys;
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v, int line) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": '" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v, int line) {
    try {
        size_t pos = 0;
        long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" + v + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void invalid(const std::string& msg) { throw Error(ErrorKind::validation_error, msg); }

bool is_hydro_kind(ScenarioKind k) {
    return k == ScenarioKind::free_packet || k == ScenarioKind::harmonic || k == ScenarioKind::damped_harmonic ||
           k == ScenarioKind::custom_potential || k == ScenarioKind::compare_solvers;
}

void validate_and_resolve(ScenarioConfig& c) {
    const PhysParams& p = c.phys;
    if (!(p.hbar > 0)) invalid("hbar must be positive");
    if (!(p.m > 0)) invalid("m must be positive");
    if (!(p.gamma >= 0)) invalid("gamma must be non-negative");
    if (!(p.omega0 > 0)) invalid("omega0 must be positive");
    if (!(c.R > 0)) invalid("R must be positive");
    if (!(c.sigma0 > 0)) invalid("sigma0 must be positive");
    if (c.n < 8) invalid("n must be at least 8");
    if (is_hydro_kind(c.kind) && c.n < 32) invalid("n must be at least 32 for hydro scenarios");
    if (!(c.length > 0)) invalid("length must be positive");
    if (!(c.t_end >= 0)) invalid("t_end must be non-negative");
    if (c.dt < 0 || !std::isfinite(c.dt)) invalid("dt must be positive");
    if (c.oracle_dt < 0 || !std::isfinite(c.oracle_dt)) invalid("oracle_dt must be positive");
    if (c.sample_every < 1) invalid("sample_every must be at least 1");
    if (c.lmax < 0) invalid("lmax must be non-negative");
    if (c.trials < 1) invalid("trials must be at least 1");
    if (!(c.epsilon >= 0)) invalid("epsilon must be non-negative");
    if (c.kind == ScenarioKind::harmonic && p.gamma > 0) invalid("gamma must be 0 for harmonic; use damped_harmonic");
    if (c.kind == ScenarioKind::damped_harmonic && !(p.gamma > 0)) invalid("damped_harmonic needs gamma > 0");
    if (c.kind == ScenarioKind::custom_potential && c.potential_coeffs.empty())
        invalid("custom_potential needs potential_coeffs");
    if (c.potential != "none" && c.potential != "harmonic") invalid("potential must be none or harmonic");
    {
        auto names = canonical_state_names();
        if (std::find(names.begin(), names.end(), c.state) == names.end()) invalid("unknown state '" + c.state + "'");
    }
    for (auto [l, m] : c.sphere_modes)
        if (l < 0 || l > c.lmax || std::abs(m) > l) invalid("sphere_modes entry outside 0 <= |m| <= l <= lmax");
    if (c.kind == ScenarioKind::sphere && c.sphere_modes.empty()) invalid("sphere needs sphere_modes");

    if (c.dt == 0) {
        if (c.kind == ScenarioKind::sphere) c.dt = 1e-3;
        else c.dt = stability_bound(make_grid(c.n, c.x_min, c.length), c.phys);
    }
    if (c.oracle_dt == 0) c.oracle_dt = default_wave_dt(make_grid(c.n, c.x_min, c.length), c.phys);

    auto& r = c.resolved;
    r.clear();
    r["name"] = c.name;
    r["kind"] = kind_label(c.kind);
    r["hbar"] = fmt(p.hbar);
    r["m"] = fmt(p.m);
    r["omega0"] = fmt(p.omega0);
    r["gamma"] = fmt(p.gamma);
    r["R"] = fmt(c.R);
    r["sigma0"] = fmt(c.sigma0);
    r["k0"] = fmt(c.k0);
    r["x0"] = fmt(c.x0);
    r["n"] = std::to_string(c.n);
    r["x_min"] = fmt(c.x_min);
    r["length"] = fmt(c.length);
    r["dt"] = fmt(c.dt);
    r["oracle_dt"] = fmt(c.oracle_dt);
    r["t_end"] = fmt(c.t_end);
    r["sample_every"] = std::to_string(c.sample_every);
    r["seed"] = std::to_string(c.seed);
    r["lmax"] = std::to_string(c.lmax);
    r["trials"] = std::to_string(c.trials);
    r["epsilon"] = fmt(c.epsilon);
    r["state"] = c.state;
    r["potential"] = c.potential;
    std::string pc;
    for (double v : c.potential_coeffs) pc += (pc.empty() ? "" : ",") + fmt(v);
    r["potential_coeffs"] = pc;
    std::string sm;
    for (auto [l, m] : c.sphere_modes) sm += (sm.empty() ? "" : ",") + std::to_string(l) + ":" + std::to_string(m);
    r["sphere_modes"] = sm;
    r["include_quantum"] = c.include_quantum ? "true" : "false";
}

}  // namespace

std::vector<std::string> config_keys() { return known_keys(); }

std::string suggest_key(const std::string& unknown) {
    std::string best;
    size_t bd = 3;
    for (const auto& k : known_keys()) {
        const size_t d = edit_distance(unknown, k);
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    return best;
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& default_name) {
    ScenarioConfig c;
    c.name = default_name;
    bool have_kind = false;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": empty key");
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            std::string msg = "unknown key '" + key + "' on line " + std::to_string(line);
            const std::string s = suggest_key(key);
            if (!s.empty()) msg += " (did you mean '" + s + "'?)";
            throw Error(ErrorKind::validation_error, msg);
        }
        if (seen.count(key))
            throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": duplicate key '" + key + "'");
        seen[key] = line;
        if (val.empty()) throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": empty value for '" + key + "'");

        if (key == "name") c.name = val;
        else if (key == "kind") {
            bool ok = false;
            for (auto& [k, d] : scenario_catalogue())
                if (val == kind_label(k)) {
                    c.kind = k;
                    ok = true;
                }
            if (!ok) throw Error(ErrorKind::validation_error, "unknown kind '" + val + "'");
            have_kind = true;
        } else if (key == "hbar") c.phys.hbar = to_double(key, val, line);
        else if (key == "m") c.phys.m = to_double(key, val, line);
        else if (key == "omega0") c.phys.omega0 = to_double(key, val, line);
        else if (key == "gamma") c.phys.gamma = to_double(key, val, line);
        else if (key == "R") c.R = to_double(key, val, line);
        else if (key == "sigma0") c.sigma0 = to_double(key, val, line);
        else if (key == "k0") c.k0 = to_double(key, val, line);
        else if (key == "x0") c.x0 = to_double(key, val, line);
        else if (key == "n") c.n = static_cast<int>(to_int(key, val, line));
        else if (key == "x_min") c.x_min = to_double(key, val, line);
        else if (key == "length") c.length = to_double(key, val, line);
        else if (key == "dt") {
            c.dt = to_double(key, val, line);
            if (!(c.dt > 0)) invalid("dt must be positive");
        } else if (key == "oracle_dt") {
            c.oracle_dt = to_double(key, val, line);
            if (!(c.oracle_dt > 0)) invalid("oracle_dt must be positive");
        } else if (key == "t_end") c.t_end = to_double(key, val, line);
        else if (key == "sample_every") c.sample_every = static_cast<int>(to_int(key, val, line));
        else if (key == "seed") {
            const long long s = to_int(key, val, line);
            if (s < 0) invalid("seed must be non-negative");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (key == "lmax") c.lmax = static_cast<int>(to_int(key, val, line));
        else if (key == "trials") c.trials = static_cast<int>(to_int(key, val, line));
        else if (key == "epsilon") c.epsilon = to_double(key, val, line);
        else if (key == "state") c.state = val;
        else if (key == "potential") c.potential = val;
        else if (key == "potential_coeffs") {
            c.potential_coeffs.clear();
            for (const auto& t : split(val, ',')) c.potential_coeffs.push_back(to_double(key, t, line));
        } else if (key == "sphere_modes") {
            c.sphere_modes.clear();
            for (const auto& t : split(val, ',')) {
                const auto colon = t.find(':');
                if (colon == std::string::npos)
                    throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": sphere_modes entries are l:m");
                c.sphere_modes.emplace_back(static_cast<int>(to_int(key, trim(t.substr(0, colon)), line)),
                                            static_cast<int>(to_int(key, trim(t.substr(colon + 1)), line)));
            }
        } else if (key == "include_quantum") {
            if (val == "true" || val == "1") c.include_quantum = true;
            else if (val == "false" || val == "0") c.include_quantum = false;
            else throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": include_quantum expects true or false");
        }
    }
    if (!have_kind) throw Error(ErrorKind::validation_error, "missing required key 'kind'");
    validate_and_resolve(c);
    return c;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), std::filesystem::path(path).stem().string());
}

std::string config_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [k, v] : cfg.resolved) {
        for (char ch : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------- states

std::vector<std::string> canonical_state_names() {
    return {"free_gaussian", "boosted_gaussian", "ground_state", "coherent", "two_bump"};
}

ComplexField canonical_state(const std::string& name, const Grid1D& g, const PhysParams& p, Potential& V) {
    if (name == "free_gaussian") {
        V = zero_potential(g);
        return gaussian_packet(g, 0.0, 1.0, 0.0);
    }
    if (name == "boosted_gaussian") {
        V = zero_potential(g);
        return gaussian_packet(g, 0.0, 1.0, 1.5);
    }
    if (name == "ground_state") {
        V = harmonic_potential(g, p.m, p.omega0);
        return harmonic_ground_state(g, p);
    }
    if (name == "coherent") {
        V = harmonic_potential(g, p.m, p.omega0);
        return coherent_state(g, p, 2.0, 0.5 * p.hbar);
    }
    if (name == "two_bump") {
        V = zero_potential(g);
        return two_bump_state(g, -1.5, 1.5, 1.0, 0.7);
    }
    throw Error(ErrorKind::invalid_argument, "unknown canonical state '" + name + "'");
}

// ---------------------------------------------------------------- oracle comparison

OracleComparison compare_with_oracle(const ComplexField& psi0, const Potential& V, const PhysParams& p,
                                     double t_end, double hydro_dt, double oracle_dt, int samples) {
    if (samples < 1) throw Error(ErrorKind::invalid_argument, "samples must be >= 1");
    const double interval = t_end / samples;
    const long hs = std::max(1L, static_cast<long>(std::ceil(interval / hydro_dt - 1e-9)));
    const long os = std::max(1L, static_cast<long>(std::ceil(interval / oracle_dt - 1e-9)));
    const double hh = interval / hs, ho = interval / os;
    PhysParams lin = p;
    lin.gamma = 0.0;
    ForceModel f = make_force(V, p);
    HydroIntegrator hydro(to_hydro(psi0, p), f, p);
    ComplexField a = psi0, b = psi0;
    OracleComparison out;
    for (int s = 1; s <= samples; ++s) {
        for (long k = 0; k < hs; ++k) hydro.step(hh);
        for (long k = 0; k < os; ++k) {
            if (p.gamma > 0) a = step_kostin(a, V.values, p, ho);
            else a = step_splitstep(a, V.values, lin, ho);
            b = step_crank_nicolson(b, V.values, lin, ho);
        }
        ComplexField ref(a.grid);
        for (size_t j = 0; j < ref.size(); ++j) ref[j] = 0.5 * (a[j] + b[j]);
        normalize(ref);
        HydroState r = to_hydro(ref, p);
        HydroState h = hydro.state();
        out.times.push_back(s * interval);
        out.rho_l2.push_back(l2_distance(h.rho, r.rho));
        double wv = 0.0;
        for (size_t j = 0; j < ref.size(); ++j) wv += r.rho[j] * (h.v[j] - r.v[j]) * (h.v[j] - r.v[j]);
        out.v_weighted.push_back(std::sqrt(wv * ref.grid.dx()));
        out.split_vs_cn.push_back(l2_distance(a, b));
    }
    return out;
}

// ---------------------------------------------------------------- runs

bool RunReport::all_pass() const {
    if (error) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

int exit_status(const RunReport& r) {
    if (r.error) return 3;
    return r.all_pass() ? 0 : 1;
}

namespace {

void add_check(RunReport& r, const std::string& name, double value, double limit) {
    r.checks.push_back({name, value < limit, value, limit});
}

Grid1D scenario_grid(const ScenarioConfig& c) { return make_grid(c.n, c.x_min, c.length); }

// Hydro step count rounded up to a multiple of sample_every so samples are equally spaced.
double hydro_step(const ScenarioConfig& c, long& steps) {
    steps = static_cast<long>(std::ceil(c.t_end / c.dt - 1e-9));
    steps = std::max(1L, (steps + c.sample_every - 1) / c.sample_every * c.sample_every);
    return c.t_end / steps;
}

void hydro_series(RunReport& r, const HydroTrajectory& tr, const std::function<double(double)>& x_oracle,
                  const std::function<double(double)>& var_oracle) {
    r.series.columns = {"t", "norm", "x_mean", "p_mean", "variance", "energy", "irrotationality", "x_oracle",
                        "variance_oracle"};
    r.series.descriptions = {"time", "integral of rho", "<x>", "m int rho v", "density variance",
                             "hydro energy", "sup |v - s'/m| on the support", "reference <x>",
                             "reference variance"};
    for (size_t i = 0; i < tr.times.size(); ++i) {
        const auto& d = tr.diag[i];
        const double t = tr.times[i];
        r.series.rows.push_back({t, d.norm, d.x_mean, d.p_mean, d.variance, d.energy, d.irrotationality,
                                 x_oracle(t), var_oracle(t)});
    }
}

double norm_drift(const HydroTrajectory& tr) {
    double w = 0.0;
    for (const auto& d : tr.diag) w = std::max(w, std::abs(d.norm - 1.0));
    for (const auto& c : tr.corrections) w = std::max(w, std::abs(c.norm_error));
    return w;
}

double max_irrotationality(const HydroTrajectory& tr) {
    double w = 0.0;
    for (const auto& d : tr.diag) w = std::max(w, d.irrotationality);
    return w;
}

void run_free_packet(const ScenarioConfig& c, RunReport& r) {
    const Grid1D g = scenario_grid(c);
    const PhysParams& p = c.phys;
    ForceModel f{zero_potential(g), 0.0, c.include_quantum};
    HydroState s0 = to_hydro(gaussian_packet(g, c.x0, c.sigma0, c.k0), p);
    long steps;
    const double h = hydro_step(c, steps);
    HydroTrajectory tr = run_hydro(s0, f, p, c.t_end, h, c.sample_every);
    const double v0 = p.hbar * c.k0 / p.m;
    auto var = [&](double t) { return c.include_quantum ? free_variance(c.sigma0, t, p) : c.sigma0 * c.sigma0; };
    hydro_series(r, tr, [&](double t) { return c.x0 + v0 * t; }, var);
    double worst = 0.0;
    for (size_t i = 0; i < tr.times.size(); ++i)
        worst = std::max(worst, std::abs(tr.diag[i].variance / var(tr.times[i]) - 1.0));
    add_check(r, c.include_quantum ? "variance_vs_spreading_law" : "variance_constant_without_quantum_force", worst,
              c.include_quantum ? 1e-3 : 1e-6);
    add_check(r, "norm_drift", norm_drift(tr), 1e-8);
    add_check(r, "irrotationality", max_irrotationality(tr), 1e-6);
    r.plot.columns = {"t", "variance", "variance_analytic"};
    r.plot.descriptions = {"time", "hydro density variance", "closed-form spreading law"};
    for (const auto& row : r.series.rows) r.plot.rows.push_back({row[0], row[4], row[8]});
    r.summary.push_back({"final_variance", tr.diag.back().variance});
}

void run_harmonic(const ScenarioConfig& c, RunReport& r) {
    const Grid1D g = scenario_grid(c);
    const PhysParams& p = c.phys;
    const Potential V = harmonic_potential(g, p.m, p.omega0);
    ForceModel f{V, 0.0, c.include_quantum};
    const double p0 = p.hbar * c.k0;
    HydroState s0 = to_hydro(coherent_state(g, p, c.x0, p0), p);
    long steps;
    const double h = hydro_step(c, steps);
    HydroTrajectory tr = run_hydro(s0, f, p, c.t_end, h, c.sample_every);
    const double w = p.omega0;
    auto xo = [&](double t) { return c.x0 * std::cos(w * t) + p0 / (p.m * w) * std::sin(w * t); };
    const double var0 = p.hbar / (2.0 * p.m * w);
    hydro_series(r, tr, xo, [&](double) { return var0; });
    double xerr = 0.0, eerr = 0.0;
    const double e0 = tr.diag.front().energy;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        xerr = std::max(xerr, std::abs(tr.diag[i].x_mean - xo(tr.times[i])));
        eerr = std::max(eerr, std::abs(tr.diag[i].energy - e0) / std::abs(e0));
    }
    add_check(r, "x_mean_vs_classical", xerr, 1e-3);
    add_check(r, "energy_relative_drift", eerr, 1e-5);
    add_check(r, "norm_drift", norm_drift(tr), 1e-8);
    add_check(r, "irrotationality", max_irrotationality(tr), 1e-6);
    r.plot.columns = {"t", "x_mean", "x_classical", "energy"};
    r.plot.descriptions = {"time", "hydro <x>", "classical oscillator", "hydro energy"};
    for (const auto& row : r.series.rows) r.plot.rows.push_back({row[0], row[2], row[7], row[5]});
}

void run_damped(const ScenarioConfig& c, RunReport& r) {
    const Grid1D g = scenario_grid(c);
    const PhysParams& p = c.phys;
    const Potential V = harmonic_potential(g, p.m, p.omega0);
    ForceModel f = make_force(V, p, c.include_quantum);
    const double p0 = p.hbar * c.k0;
    const ComplexField psi0 = coherent_state(g, p, c.x0, p0);
    long steps;
    const double h = hydro_step(c, steps);
    HydroTrajectory tr = run_hydro(to_hydro(psi0, p), f, p, c.t_end, h, c.sample_every);
    const long samples = steps / c.sample_every;
    const double interval = c.t_end / samples;
    // the wave run is sampled every <= 0.01 so the centred differences in the Ehrenfest check stay accurate
    const long sub = std::max(1L, static_cast<long>(std::ceil(interval / 0.01 - 1e-9)));
    long os = std::max(1L, static_cast<long>(std::ceil(interval / c.oracle_dt - 1e-9)));
    os = (os + sub - 1) / sub * sub;
    WaveTrajectory wt = run_wave(psi0, V, p, c.t_end, interval / os, static_cast<int>(os / sub), Integrator::kostin);
    auto xc = classical_damped_positions(c.x0, p0 / p.m, p.omega0, p.gamma / p.m, tr.times);

    r.series.columns = {"t", "x_hydro", "p_hydro", "kinetic_hydro", "x_wave", "p_wave", "norm_wave", "x_classical"};
    r.series.descriptions = {"time", "hydro <x>", "hydro <p>", "int rho v^2/2", "nonlinear wave <x>",
                             "nonlinear wave <p>", "wave norm", "classical damped oscillator"};
    double xh = 0.0, xw = 0.0, nw = 0.0;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        const auto& d = tr.diag[i];
        const auto& w = wt.diag[std::min<size_t>(i * sub, wt.diag.size() - 1)];
        r.series.rows.push_back({tr.times[i], d.x_mean, d.p_mean, d.kinetic, w.x_mean, w.p_mean, w.norm, xc[i]});
        xh = std::max(xh, std::abs(d.x_mean - xc[i]));
        xw = std::max(xw, std::abs(w.x_mean - xc[i]));
        nw = std::max(nw, std::abs(w.norm - 1.0));
    }
    add_check(r, "hydro_x_vs_classical", xh, 1e-3);
    add_check(r, "wave_x_vs_classical", xw, 5e-3);
    add_check(r, "wave_norm_drift", nw, 1e-8);
    add_check(r, "ehrenfest_residual", ehrenfest_residual(wt, V, p), 1e-3);
    add_check(r, "hydro_norm_drift", norm_drift(tr), 1e-8);
    r.plot.columns = {"t", "x_mean", "p_mean", "classical_x_oracle"};
    r.plot.descriptions = {"time", "nonlinear wave <x>", "nonlinear wave <p>", "classical damped oscillator"};
    for (const auto& row : r.series.rows) r.plot.rows.push_back({row[0], row[4], row[5], row[7]});
}

void run_custom(const ScenarioConfig& c, RunReport& r) {
    const Grid1D g = scenario_grid(c);
    const PhysParams& p = c.phys;
    const Potential V = polynomial_potential(g, c.potential_coeffs);
    if (!c.include_quantum) invalid("custom_potential compares against the wave equation; include_quantum must be true");
    const ComplexField psi0 = gaussian_packet(g, c.x0, c.sigma0, c.k0);
    long steps;
    const double h = hydro_step(c, steps);
    const int samples = static_cast<int>(steps / c.sample_every);
    OracleComparison oc = compare_with_oracle(psi0, V, p, c.t_end, h, c.oracle_dt, samples);
    r.series.columns = {"t", "rho_l2", "v_weighted_l2", "split_vs_cn"};
    r.series.descriptions = {"time", "L2(rho_hydro - rho_ref)", "rho-weighted L2 velocity mismatch",
                             "L2 distance between the two wave references"};
    for (size_t i = 0; i < oc.times.size(); ++i)
        r.series.rows.push_back({oc.times[i], oc.rho_l2[i], oc.v_weighted[i], oc.split_vs_cn[i]});
    add_check(r, "rho_l2_final", oc.rho_l2.back(), 1e-3);
    add_check(r, "v_weighted_final", oc.v_weighted.back(), 1e-2);
    r.plot = r.series;
}

void run_compare(const ScenarioConfig& c, RunReport& r) {
    const Grid1D g = scenario_grid(c);
    const PhysParams& p = c.phys;
    const Potential V = c.potential == "harmonic" ? harmonic_potential(g, p.m, p.omega0) : zero_potential(g);
    const ComplexField psi0 = gaussian_packet(g, c.x0, c.sigma0, c.k0);
    long steps;
    const double h = hydro_step(c, steps);
    OracleComparison oc = compare_with_oracle(psi0, V, p, c.t_end, h, c.oracle_dt,
                                              static_cast<int>(steps / c.sample_every));
    r.series.columns = {"t", "rho_l2", "v_weighted_l2", "split_vs_cn"};
    r.series.descriptions = {"time", "L2(rho_hydro - rho_ref)", "rho-weighted L2 velocity mismatch",
                             "L2 distance between the two wave references"};
    double cross = 0.0;
    for (size_t i = 0; i < oc.times.size(); ++i) {
        r.series.rows.push_back({oc.times[i], oc.rho_l2[i], oc.v_weighted[i], oc.split_vs_cn[i]});
        cross = std::max(cross, oc.split_vs_cn[i]);
    }
    add_check(r, "rho_l2_final", oc.rho_l2.back(), 1e-3);
    add_check(r, "v_weighted_final", oc.v_weighted.back(), 1e-2);
    add_check(r, "split_vs_cn", cross, 1e-6);
    r.plot = r.series;
}

void run_verify(const ScenarioConfig& c, RunReport& r) {
    const Grid1D g = scenario_grid(c);
    const PhysParams& p = c.phys;
    Potential V;
    const ComplexField psi = canonical_state(c.state, g, p, V);
    HydroState s = to_hydro(psi, p);
    ForceModel f = make_force(V, p, c.include_quantum);
    std::vector<MinimumTrial> trials;
    MinimumReport rep = verify_minimum(s, f, p, c.trials, c.epsilon, c.seed, &trials);
    r.series.columns = {"trial", "margin", "expected", "quadratic_error"};
    r.series.descriptions = {"trial index", "Z(a*+eps d) - Z(a*)", "eps^2 int rho d^2",
                             "relative deviation from the quadratic law"};
    for (size_t i = 0; i < trials.size(); ++i)
        r.series.rows.push_back({double(i), trials[i].margin, trials[i].expected, trials[i].quadratic_error});
    r.checks.push_back({"nonnegative_margins", rep.nonnegative == rep.trials, double(rep.nonnegative), double(rep.trials)});
    add_check(r, "quadratic_law", rep.worst_quadratic_error, 1e-8);
    add_check(r, "Z_at_minimizer", rep.z_at_minimum, 1e-16);
    r.summary.push_back({"worst_margin", rep.worst_margin});
    r.plot = r.series;
}

void run_sphere(const ScenarioConfig& c, RunReport& r) {
    const PhysParams& p = c.phys;
    SphereState s = make_sphere_state(c.lmax, c.R);
    for (auto [l, m] : c.sphere_modes) s.at(l, m) += 1.0;
    normalize(s);
    const SphereState s0 = s;
    const long steps = std::max(1L, static_cast<long>(std::ceil(c.t_end / c.dt - 1e-9)));
    const double h = c.t_end / steps;
    r.series.columns = {"t", "fidelity", "norm"};
    r.series.descriptions = {"time", "|<psi(0)|psi(t)>|", "sum |c|^2 R^2"};
    double prev2 = 1.0, prev1 = 1.0, revival = -1.0, worst_norm = 0.0;
    bool dipped = false;
    r.series.rows.push_back({0.0, 1.0, sphere_norm(s)});
    for (long k = 1; k <= steps; ++k) {
        s = step_sphere_schrodinger(s, h, p);
        const double fid = std::abs(sphere_overlap(s0, s));
        worst_norm = std::max(worst_norm, std::abs(sphere_norm(s) - 1.0));
        if (fid < 0.5) dipped = true;
        if (dipped && revival < 0 && k >= 2 && prev1 >= prev2 && prev1 >= fid) revival = (k - 1) * h;
        prev2 = prev1;
        prev1 = fid;
        if (k % c.sample_every == 0 || k == steps) r.series.rows.push_back({k * h, fid, sphere_norm(s)});
    }
    add_check(r, "norm_drift", worst_norm, 1e-12);
    if (c.sphere_modes.size() == 2) {
        const double e1 = sphere_energy(c.sphere_modes[0].first, c.R, p);
        const double e2 = sphere_energy(c.sphere_modes[1].first, c.R, p);
        if (e1 != e2) {
            const double period = 2.0 * M_PI * p.hbar / std::abs(e2 - e1);
            r.summary.push_back({"revival_expected", period});
            r.summary.push_back({"revival_measured", revival});
            if (c.t_end >= period + h) r.checks.push_back({"revival_time", revival > 0 && std::abs(revival - period) <= h,
                                                           std::abs(revival - period), h});
        }
    }
    const SphereGrid sg = make_sphere_grid(c.lmax, c.lmax + 2, 2 * c.lmax + 3);
    const ParametricSurface surf = sphere_surface(c.R);
    double vs = 0.0;
    for (int i = 0; i < sg.nlat; ++i)
        for (int j = 0; j < sg.nlon; ++j) vs = std::max(vs, std::abs(geometric_potential(surf, sg.theta[i], sg.phi[j], p)));
    add_check(r, "geometric_potential_zero", vs, 1e-12);
    SphereHydro sh = sphere_to_hydro(s0, sg, p);
    TangentMinimum tm = minimize_Z_tangent(sh.tangent, SurfaceForce{0.0, c.include_quantum}, p);
    r.summary.push_back({"tangent_residual_initial", tm.residual});
    r.plot = r.series;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
    RunReport r;
    r.name = cfg.name;
    r.kind = cfg.kind;
    r.seed = cfg.seed;
    r.config_hash = config_hash(cfg);
    try {
        switch (cfg.kind) {
            case ScenarioKind::free_packet: run_free_packet(cfg, r); break;
            case ScenarioKind::harmonic: run_harmonic(cfg, r); break;
            case ScenarioKind::damped_harmonic: run_damped(cfg, r); break;
            case ScenarioKind::sphere: run_sphere(cfg, r); break;
            case ScenarioKind::custom_potential: run_custom(cfg, r); break;
            case ScenarioKind::verify_constraint: run_verify(cfg, r); break;
            case ScenarioKind::compare_solvers: run_compare(cfg, r); break;
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::validation_error || e.kind() == ErrorKind::parse_error) throw;
        r.error = std::make_pair(e.kind(), std::string(e.what()));
    }
    return r;
}

// ---------------------------------------------------------------- output

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::io, "cannot write " + path);
    return f;
}

}  // namespace

void write_series(const RunReport& r, const std::string& path) {
    auto f = open_out(path);
    f << "# qgauss series: " << r.name << " (" << kind_label(r.kind) << ")\n";
    for (size_t i = 0; i < r.series.columns.size(); ++i)
        f << "# " << r.series.columns[i] << ": "
          << (i < r.series.descriptions.size() ? r.series.descriptions[i] : "") << "\n";
    for (size_t i = 0; i < r.series.columns.size(); ++i) f << (i ? "," : "") << r.series.columns[i];
    f << "\n";
    for (const auto& row : r.series.rows) {
        for (size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << num(row[i]);
        f << "\n";
    }
    if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

void emit_plot_data(const RunReport& r, const std::string& path) {
    auto f = open_out(path);
    f << "# qgauss plot data: " << r.name << " (" << kind_label(r.kind) << ")\n";
    for (size_t i = 0; i < r.plot.columns.size(); ++i)
        f << "# column " << i + 1 << ": " << r.plot.columns[i] << " - "
          << (i < r.plot.descriptions.size() ? r.plot.descriptions[i] : "") << "\n";
    for (const auto& row : r.plot.rows) {
        for (size_t i = 0; i < row.size(); ++i) f << (i ? " " : "") << num(row[i]);
        f << "\n";
    }
    if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

void write_report(const RunReport& r, const std::string& dir, const std::string& timestamp) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + dir + ": " + ec.message());
    const std::string base = (std::filesystem::path(dir) / r.name).string();
    {
        auto f = open_out(base + ".report.txt");
        f << "# qgauss run report\n";
        f << "name: " << r.name << "\n";
        f << "kind: " << kind_label(r.kind) << "\n";
        f << "version: " << kVersion << "\n";
        f << "seed: " << r.seed << "\n";
        f << "config_hash: " << r.config_hash << "\n";
        f << "timestamp: " << timestamp << "\n";
        for (const auto& [k, v] : r.summary) f << "summary " << k << " = " << num(v) << "\n";
        for (const auto& c : r.checks)
            f << "check " << c.name << " " << (c.pass ? "pass" : "FAIL") << " value=" << num(c.value)
              << " limit=" << num(c.limit) << "\n";
        if (r.error) {
            f << "error.kind: " << kind_name(r.error->first) << "\n";
            f << "error.message: " << r.error->second << "\n";
        }
        f << "status: " << (r.error ? "error" : r.all_pass() ? "pass" : "fail") << "\n";
        if (!f) throw Error(ErrorKind::io, "write failed for " + base + ".report.txt");
    }
    write_series(r, base + ".series.csv");
    emit_plot_data(r, base + ".plot.dat");
}

}  // namespace qgauss
