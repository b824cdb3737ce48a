#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgauss/constraint.hpp"
#include "qgauss/error.hpp"
#include "qgauss/madelung.hpp"

namespace qgauss {

inline constexpr const char* kVersion = "0.1.0";

enum class ScenarioKind {
    free_packet,
    harmonic,
    damped_harmonic,
    sphere,
    custom_potential,
    verify_constraint,
    compare_solvers,
};

const char* kind_label(ScenarioKind k);
std::vector<std::pair<ScenarioKind, std::string>> scenario_catalogue();

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::free_packet;
    PhysParams phys;
    double R = 1.0, sigma0 = 1.0, k0 = 0.0, x0 = 0.0;
    int n = 256;
    double x_min = -20.0, length = 40.0;
    double dt = 0.0;         // 0 selects the default for the kind
    double oracle_dt = 0.0;  // wave-function reference step, 0 selects the default
    double t_end = 1.0;
    int sample_every = 100;
    std::uint64_t seed = 42;
    int lmax = 8;
    int trials = 100;
    double epsilon = 1e-3;
    std::string state = "free_gaussian";
    std::string potential = "none";
    std::vector<double> potential_coeffs;
    std::vector<std::pair<int, int>> sphere_modes = {{1, 0}, {2, 0}};
    bool include_quantum = true;

    // key=value pairs after defaulting, sorted; hashed for provenance
    std::map<std::string, std::string> resolved;
};

// Strict key=value parser: '#' starts a comment, unknown keys are rejected.
ScenarioConfig parse_config_text(const std::string& text, const std::string& default_name = "scenario");
ScenarioConfig parse_config(const std::string& path);

std::vector<std::string> config_keys();
// Closest known key within edit distance 2, or empty.
std::string suggest_key(const std::string& unknown);

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double limit = 0.0;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::string> descriptions;
    std::vector<std::vector<double>> rows;
};

struct RunReport {
    std::string name;
    ScenarioKind kind = ScenarioKind::free_packet;
    std::uint64_t seed = 0;
    std::string config_hash;
    Table series;
    Table plot;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> summary;
    std::optional<std::pair<ErrorKind, std::string>> error;

    bool all_pass() const;
};

std::string config_hash(const ScenarioConfig& cfg);

RunReport run_scenario(const ScenarioConfig& cfg);

// 0 all checks pass, 1 a check failed, 3 solver error.
int exit_status(const RunReport& r);

// Writes <dir>/<name>.report.txt, .series.csv and .plot.dat.
void write_report(const RunReport& r, const std::string& dir, const std::string& timestamp);
void write_series(const RunReport& r, const std::string& path);
void emit_plot_data(const RunReport& r, const std::string& path);

// Canonical node-free test states by name: free_gaussian, boosted_gaussian, ground_state,
// coherent, two_bump. Fills V with the matching potential.
ComplexField canonical_state(const std::string& name, const Grid1D& g, const PhysParams& p, Potential& V);
std::vector<std::string> canonical_state_names();

struct OracleComparison {
    std::vector<double> times;
    std::vector<double> rho_l2;        // L2(rho_hydro - rho_ref)
    std::vector<double> v_weighted;    // sqrt(int rho_ref (v_hydro - v_ref)^2)
    std::vector<double> split_vs_cn;   // L2 distance of the two reference wave functions
};

// Hydro run against the mean of split-step and Crank-Nicolson references, sampled at
// `samples` equally spaced times in (0, t_end].
OracleComparison compare_with_oracle(const ComplexField& psi0, const Potential& V, const PhysParams& p,
                                     double t_end, double hydro_dt, double oracle_dt, int samples);

}  // namespace qgauss
