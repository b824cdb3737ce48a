#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "qgauss/scenario.hpp"

using namespace qgauss;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

enum class Mode { run, verify, compare };

struct Outcome {
    int status = 0;
    std::string text;
};

Outcome run_one(const std::string& path, Mode mode, const std::optional<std::uint64_t>& seed,
                const std::string& out_root) {
    Outcome o;
    std::ostringstream msg;
    try {
        ScenarioConfig cfg = parse_config(path);
        if (seed) {
            cfg.seed = *seed;
            cfg.resolved["seed"] = std::to_string(*seed);
        }
        if (mode == Mode::compare) {
            cfg.kind = ScenarioKind::compare_solvers;
            cfg.resolved["kind"] = kind_label(cfg.kind);
        }
        RunReport r = run_scenario(cfg);
        const std::string dir = (std::filesystem::path(out_root) / cfg.name).string();
        write_report(r, dir, utc_timestamp());
        o.status = exit_status(r);
        msg << cfg.name << " (" << kind_label(cfg.kind) << ")";
        if (r.error) {
            msg << ": error [" << kind_name(r.error->first) << "] " << r.error->second << "\n";
        } else {
            msg << ": " << (r.all_pass() ? "pass" : "FAIL") << "\n";
            if (mode != Mode::run || !r.all_pass())
                for (const auto& c : r.checks)
                    msg << "  " << (c.pass ? "pass " : "FAIL ") << c.name << " value=" << c.value
                        << " limit=" << c.limit << "\n";
        }
        msg << "  output: " << dir << "\n";
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse_error || e.kind() == ErrorKind::validation_error) {
            o.status = 2;
            msg << path << ": " << kind_name(e.kind()) << ": " << e.what() << "\n";
        } else {
            o.status = 3;
            msg << path << ": error [" << kind_name(e.kind()) << "] " << e.what() << "\n";
        }
    } catch (const std::exception& e) {
        o.status = 3;
        msg << path << ": error " << e.what() << "\n";
    }
    o.text = msg.str();
    return o;
}

int run_batch(const std::vector<std::string>& configs, Mode mode, const std::optional<std::uint64_t>& seed,
              const std::string& out_root, int jobs) {
    std::vector<Outcome> results(configs.size());
    std::atomic<size_t> next{0};
    std::mutex io;
    auto worker = [&] {
        for (size_t i; (i = next++) < configs.size();) {
            results[i] = run_one(configs[i], mode, seed, out_root);
            std::lock_guard lk(io);
            std::cout << results[i].text << std::flush;
        }
    };
    const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    // worst status wins: 2 (config) and 3 (solver) outrank 1 (check failure)
    int status = 0;
    for (const auto& r : results) {
        if (r.status == 3 || (r.status == 2 && status != 3)) status = r.status;
        else if (r.status == 1 && status == 0) status = 1;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qgauss: least-constraint quantum hydrodynamics scenarios"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int jobs = 1;
    std::vector<std::string> configs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", configs, "scenario config file(s)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out-dir", out_dir, "output root (default $QGAUSS_OUT_DIR or ./qgauss_out)");
        sub->add_option("--jobs", jobs, "run up to N configs concurrently")->check(CLI::PositiveNumber);
    };
    auto* run = app.add_subcommand("run", "run scenario(s) and write report, series and plot data");
    add_common(run);
    auto* verify = app.add_subcommand("verify", "run scenario(s) and print every invariant check");
    add_common(verify);
    auto* compare = app.add_subcommand("compare", "compare the hydro solver with the wave-equation references");
    add_common(compare);
    auto* list = app.add_subcommand("list-scenarios", "list built-in scenario kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& [k, d] : scenario_catalogue()) std::printf("%-18s %s\n", kind_label(k), d.c_str());
        return 0;
    }
    if (out_dir.empty()) {
        const char* env = std::getenv("QGAUSS_OUT_DIR");
        out_dir = env && *env ? env : "qgauss_out";
    }
    const Mode mode = run->parsed() ? Mode::run : verify->parsed() ? Mode::verify : Mode::compare;
    return run_batch(configs, mode, seed, out_dir, jobs);
}
