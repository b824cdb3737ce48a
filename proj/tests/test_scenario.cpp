#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qgauss/error.hpp"
#include "qgauss/hydro.hpp"
#include "qgauss/scenario.hpp"

using namespace qgauss;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        parse_config_text(text, "t");
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::io;  // sentinel: nothing thrown
}

std::string message_of(const std::string& text) {
    try {
        parse_config_text(text, "t");
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("qgauss_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("minimal config gets the stability-rule step") {
    auto c = parse_config_text("kind = free_packet\nn = 256\nsigma0 = 1\n", "minimal");
    CHECK(c.name == "minimal");
    CHECK(c.kind == ScenarioKind::free_packet);
    CHECK(c.dt == doctest::Approx(stability_bound(make_grid(256, -20, 40), c.phys)));
    CHECK(c.resolved.at("dt") != "0");
}

TEST_CASE("config errors") {
    CHECK(kind_of("kind = free_packet\ngamma = -0.1\n") == ErrorKind::validation_error);
    CHECK(message_of("kind = free_packet\ngamma = -0.1\n").find("gamma must be non-negative") != std::string::npos);

    CHECK(kind_of("kind = free_packet\nhbarr = 1\n") == ErrorKind::validation_error);
    CHECK(message_of("kind = free_packet\nhbarr = 1\n").find("did you mean 'hbar'") != std::string::npos);
    CHECK(suggest_key("sigma") == "sigma0");
    CHECK(suggest_key("zzzzzzzz").empty());

    CHECK(kind_of("kind = free_packet\nn 12\n") == ErrorKind::parse_error);
    CHECK(message_of("kind = free_packet\n\n# c\nn 12\n").find("line 4") != std::string::npos);
    CHECK(kind_of("kind = free_packet\nn = 1.5\n") == ErrorKind::parse_error);
    CHECK(kind_of("kind = free_packet\nn = 64\nn = 128\n") == ErrorKind::parse_error);
    CHECK(kind_of("n = 64\n") == ErrorKind::validation_error);
    CHECK(kind_of("kind = warp_drive\n") == ErrorKind::validation_error);
    CHECK(kind_of("kind = damped_harmonic\n") == ErrorKind::validation_error);
    CHECK(kind_of("kind = custom_potential\n") == ErrorKind::validation_error);
    CHECK(kind_of("kind = sphere\nsphere_modes = 3:4\n") == ErrorKind::validation_error);
    CHECK(kind_of("kind = free_packet\nhbar = 0\n") == ErrorKind::validation_error);
    CHECK(kind_of("kind = free_packet\ndt = -1\n") == ErrorKind::validation_error);
}

TEST_CASE("list values and comments") {
    auto c = parse_config_text("kind = sphere # trailing comment\nsphere_modes = 1:0, 2:-1\nlmax=4\n", "s");
    REQUIRE(c.sphere_modes.size() == 2);
    CHECK(c.sphere_modes[1] == std::pair<int, int>{2, -1});
    auto q = parse_config_text("kind = custom_potential\npotential_coeffs = 0, 0, 0.5\n", "q");
    CHECK(q.potential_coeffs == std::vector<double>{0, 0, 0.5});
}

TEST_CASE("config hash follows the resolved values") {
    auto a = parse_config_text("kind = free_packet\n", "x");
    auto b = parse_config_text("kind = free_packet\nn = 256\n", "x");
    auto c = parse_config_text("kind = free_packet\nseed = 7\n", "x");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("verify_constraint scenario") {
    auto c = parse_config_text("kind = verify_constraint\nseed = 42\ntrials = 100\n", "vc");
    auto r = run_scenario(c);
    CHECK(r.all_pass());
    CHECK(exit_status(r) == 0);
    REQUIRE(r.checks.size() >= 1);
    CHECK(r.checks[0].name == "nonnegative_margins");
    CHECK(r.checks[0].value == 100);
    CHECK(r.series.rows.size() == 100);
}

TEST_CASE("sphere scenario revival") {
    auto c = parse_config_text("kind = sphere\nsphere_modes = 1:0, 2:0\nt_end = 4\ndt = 1e-3\n", "sph");
    auto r = run_scenario(c);
    CHECK(r.all_pass());
    bool found = false;
    for (const auto& ch : r.checks)
        if (ch.name == "revival_time") found = true;
    CHECK(found);
}

TEST_CASE("solver errors become an error block") {
    // a packet far too narrow for the grid cannot be integrated
    auto c = parse_config_text("kind = free_packet\nsigma0 = 0.05\nt_end = 0.1\n", "narrow");
    auto r = run_scenario(c);
    REQUIRE(r.error);
    CHECK(r.error->first == ErrorKind::degenerate_state);
    CHECK(exit_status(r) == 3);
    auto dir = scratch("err");
    write_report(r, dir.string(), "T");
    auto rep = slurp(dir / "narrow.report.txt");
    CHECK(rep.find("error.kind: degenerate-state") != std::string::npos);
    CHECK(rep.find("status: error") != std::string::npos);
}

TEST_CASE("output schema") {
    auto c = parse_config_text("kind = free_packet\nt_end = 0.5\nsample_every = 50\n", "spread");
    auto r = run_scenario(c);
    CHECK(r.all_pass());
    auto dir = scratch("schema");
    write_report(r, dir.string(), "2000-01-01T00:00:00Z");

    std::ifstream plot(dir / "spread.plot.dat");
    std::string line;
    int header = 0, rows = 0;
    while (std::getline(plot, line)) {
        if (line.rfind("#", 0) == 0) {
            ++header;
            continue;
        }
        std::istringstream ls(line);
        double x;
        int cols = 0;
        while (ls >> x) ++cols;
        CHECK(cols == 3);
        ++rows;
    }
    CHECK(header == 1 + 3);
    CHECK(r.plot.columns == std::vector<std::string>{"t", "variance", "variance_analytic"});
    CHECK(rows == static_cast<int>(r.series.rows.size()));

    std::ifstream series(dir / "spread.series.csv");
    int hash_lines = 0;
    std::string column_row;
    while (std::getline(series, line)) {
        if (line.rfind("#", 0) == 0) {
            ++hash_lines;
            continue;
        }
        column_row = line;
        break;
    }
    CHECK(hash_lines == 1 + static_cast<int>(r.series.columns.size()));
    CHECK(column_row.rfind("t,norm,x_mean", 0) == 0);

    auto rep = slurp(dir / "spread.report.txt");
    CHECK(rep.find("config_hash: " + config_hash(c)) != std::string::npos);
    CHECK(rep.find(std::string("version: ") + kVersion) != std::string::npos);
    CHECK(rep.find("seed: 42") != std::string::npos);
}

TEST_CASE("damped scenario plot columns") {
    auto c = parse_config_text("kind = damped_harmonic\ngamma = 0.2\nx0 = 2\nt_end = 2\nsample_every = 100\n", "k");
    auto r = run_scenario(c);
    CHECK(r.plot.columns == std::vector<std::string>{"t", "x_mean", "p_mean", "classical_x_oracle"});
}

TEST_CASE("reruns are byte-identical apart from the timestamp") {
    auto c = parse_config_text("kind = verify_constraint\nstate = coherent\nseed = 9\ntrials = 20\n", "det");
    auto d1 = scratch("det1"), d2 = scratch("det2");
    write_report(run_scenario(c), d1.string(), "T1");
    write_report(run_scenario(c), d2.string(), "T2");
    CHECK(slurp(d1 / "det.series.csv") == slurp(d2 / "det.series.csv"));
    CHECK(slurp(d1 / "det.plot.dat") == slurp(d2 / "det.plot.dat"));
    auto strip = [](std::string s) {
        auto a = s.find("timestamp:");
        return s.erase(a, s.find('\n', a) - a);
    };
    CHECK(strip(slurp(d1 / "det.report.txt")) == strip(slurp(d2 / "det.report.txt")));
}

TEST_CASE("parse_config reads files and names runs after them") {
    auto d = scratch("file");
    fs::create_directories(d);
    std::ofstream(d / "my_run.cfg") << "kind = free_packet\n";
    CHECK(parse_config((d / "my_run.cfg").string()).name == "my_run");
    try {
        parse_config((d / "absent.cfg").string());
        FAIL("missing file accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
    }
}
