#include "doctest.h"

#include <cmath>

#include "qgauss/error.hpp"
#include "qgauss/hydro.hpp"
#include "qgauss/schrodinger.hpp"
#include "qgauss/states.hpp"

using namespace qgauss;

namespace {

double sup_on(const RealField& f, const RealField& rho) {
    double e = 0;
    const double fl = density_floor(rho);
    for (size_t j = 0; j < f.size(); ++j)
        if (rho[j] > fl) e = std::max(e, std::abs(f[j]));
    return e;
}

}  // namespace

TEST_CASE("rates vanish for the ground state") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto s = to_hydro(harmonic_ground_state(g, p), p);
    auto r = hydro_rhs(s, make_force(harmonic_potential(g, p.m, p.omega0), p), p);
    CHECK(sup_on(r.drho_dt, s.rho) < 1e-7);
    CHECK(sup_on(r.dv_dt, s.rho) < 1e-7);
}

TEST_CASE("rates for uniform flow and a packet at rest") {
    PhysParams p;
    auto g = make_grid(64, 0.0, 10.0);
    HydroState u{RealField(g, 0.1), RealField(g, 0.4), std::nullopt};
    auto r = hydro_rhs(u, make_force(zero_potential(g), p), p);
    for (size_t j = 0; j < 64; ++j) {
        CHECK(std::abs(r.drho_dt[j]) < 1e-14);
        CHECK(std::abs(r.dv_dt[j]) < 1e-14);
    }

    auto g2 = make_grid(256, -20.0, 40.0);
    auto s = to_hydro(gaussian_packet(g2, 0.0, 1.0), p);
    auto r2 = hydro_rhs(s, make_force(zero_potential(g2), p), p);
    double e = 0;
    for (size_t j = 0; j < 256; ++j) {
        const double x = g2.x(static_cast<int>(j));
        CHECK(std::abs(r2.drho_dt[j]) < 1e-14);
        if (std::abs(x) < 6) e = std::max(e, std::abs(r2.dv_dt[j] - x / 4));
    }
    CHECK(e < 1e-8);
}

TEST_CASE("ground state stays put") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto s0 = to_hydro(harmonic_ground_state(g, p), p);
    auto f = make_force(harmonic_potential(g, p.m, p.omega0), p);
    HydroIntegrator it(s0, f, p);
    const double dt = stability_bound(g, p);
    for (int k = 0; k < 20; ++k) {
        auto before = it.state();
        it.step(dt);
        auto after = it.state();
        double e = 0;
        for (size_t j = 0; j < after.rho.size(); ++j) {
            e = std::max(e, std::abs(after.rho[j] - before.rho[j]));
            if (after.rho[j] > density_floor(after.rho)) e = std::max(e, std::abs(after.v[j] - before.v[j]));
        }
        CHECK(e < 1e-6);
    }
}

TEST_CASE("step above the stability bound is rejected") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto s0 = to_hydro(gaussian_packet(g, 0.0, 1.0), p);
    auto f = make_force(zero_potential(g), p);
    try {
        step_hydro(s0, f, p, 1.01 * stability_bound(g, p));
        FAIL("step accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::stability_violation);
    }
    CHECK_NOTHROW(step_hydro(s0, f, p, stability_bound(g, p)));
}

TEST_CASE("free packet spreads like the closed form") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto s0 = to_hydro(gaussian_packet(g, 0.0, 1.0), p);
    auto f = make_force(zero_potential(g), p);
    const double dt = stability_bound(g, p);
    auto tr = run_hydro(s0, f, p, 1000 * dt, dt, 100);
    double worst = 0;
    for (size_t i = 0; i < tr.times.size(); ++i)
        worst = std::max(worst, std::abs(tr.diag[i].variance / free_variance(1.0, tr.times[i], p) - 1));
    CHECK(worst < 1e-3);
}

TEST_CASE("variance doubles by t = 2") {
    auto g = make_grid(512, -20.0, 40.0);
    PhysParams p;
    auto tr = run_hydro(to_hydro(gaussian_packet(g, 0.0, 1.0), p), make_force(zero_potential(g), p), p, 2.0,
                        stability_bound(g, p), 1000);
    CHECK(tr.times.back() == doctest::Approx(2.0));
    CHECK(std::abs(tr.diag.back().variance - 2.0) < 2e-3);
    CHECK(std::abs(tr.diag.back().norm - 1.0) < 1e-8);
}

TEST_CASE("damped coherent packet follows the classical oscillator") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    p.gamma = 0.2;
    auto f = make_force(harmonic_potential(g, p.m, p.omega0), p);
    auto tr = run_hydro(to_hydro(coherent_state(g, p, 2.0), p), f, p, 4 * M_PI, stability_bound(g, p), 100);
    auto xc = classical_damped_positions(2.0, 0.0, p.omega0, p.gamma / p.m, tr.times);
    double e = 0;
    for (size_t i = 0; i < xc.size(); ++i) e = std::max(e, std::abs(tr.diag[i].x_mean - xc[i]));
    CHECK(e < 1e-3);
}

TEST_CASE("conservative coherent packet keeps its energy") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto f = make_force(harmonic_potential(g, p.m, p.omega0), p);
    auto tr = run_hydro(to_hydro(coherent_state(g, p, 1.5, 0.5), p), f, p, 2 * M_PI, stability_bound(g, p), 100);
    const double e0 = tr.diag.front().energy;
    // coherent state energy: hbar omega / 2 + m omega^2 x0^2 / 2 + p0^2 / 2m
    CHECK(e0 == doctest::Approx(0.5 + 0.5 * 1.5 * 1.5 + 0.125).epsilon(1e-9));
    for (const auto& d : tr.diag) CHECK(std::abs(d.energy - e0) / e0 < 1e-5);
}

TEST_CASE("irrotationality is maintained") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto f = make_force(zero_potential(g), p);
    auto tr = run_hydro(to_hydro(gaussian_packet(g, -1.0, 1.0, 1.0), p), f, p, 1.0, stability_bound(g, p), 200);
    for (const auto& d : tr.diag) CHECK(d.irrotationality < 1e-6);
}

TEST_CASE("integrator requires a resolved support") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto f = make_force(zero_potential(g), p);
    try {
        HydroIntegrator it(to_hydro(gaussian_packet(g, 0.0, 0.05), p), f, p);
        FAIL("narrow support accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_state);
    }
    auto g2 = make_grid(16, -5.0, 10.0);
    CHECK_THROWS_AS(HydroIntegrator(to_hydro(gaussian_packet(g2, 0.0, 1.0), p), make_force(zero_potential(g2), p), p),
                    Error);
}

TEST_CASE("missing phase is reconstructed from the velocity") {
    auto g = make_grid(256, -20.0, 40.0);
    PhysParams p;
    auto full = to_hydro(gaussian_packet(g, 0.0, 1.0, 0.8), p);
    HydroState bare{full.rho, full.v, std::nullopt};
    auto f = make_force(zero_potential(g), p);
    auto a = run_hydro(full, f, p, 0.5, stability_bound(g, p), 50);
    auto b = run_hydro(bare, f, p, 0.5, stability_bound(g, p), 50);
    CHECK(l2_distance(a.states.back().rho, b.states.back().rho) < 1e-9);
}
