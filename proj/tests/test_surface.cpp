#include "doctest.h"

#include <cmath>
#include <random>

#include "qgauss/error.hpp"
#include "qgauss/surface.hpp"

using namespace qgauss;

TEST_CASE("curvatures of simple surfaces") {
    auto s = curvatures(sphere_surface(2.0), 0.7, 1.1);
    CHECK(s.M == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.K == doctest::Approx(0.25).epsilon(1e-14));
    auto c = curvatures(cylinder_surface(1.0), 0.3, 0.2);
    CHECK(c.M == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(c.K) < 1e-15);
    auto p = curvatures(plane_surface(), 0.3, 0.4);
    CHECK(p.M == 0.0);
    CHECK(p.K == 0.0);
}

TEST_CASE("geometric potential") {
    PhysParams ph;
    for (double R : {0.5, 1.0, 3.0})
        for (double th : {0.2, 1.0, 2.5}) CHECK(std::abs(geometric_potential(sphere_surface(R), th, 0.4, ph)) < 1e-12);
    CHECK(geometric_potential(cylinder_surface(2.0), 0.1, 0.0, ph) == doctest::Approx(-1.0 / 32).epsilon(1e-10));

    // torus outer equator: M = (R + 2r) / (2 r (R + r)), K = 1 / (r (R + r))
    const double Rm = 2.0, r = 0.5;
    auto t = curvatures(torus_surface(Rm, r), 0.0, 0.0);
    CHECK(t.M == doctest::Approx((Rm + 2 * r) / (2 * r * (Rm + r))).epsilon(1e-12));
    CHECK(t.K == doctest::Approx(1.0 / (r * (Rm + r))).epsilon(1e-12));
    const double M = (Rm + 2 * r) / (2 * r * (Rm + r)), K = 1.0 / (r * (Rm + r));
    CHECK(geometric_potential(torus_surface(Rm, r), 0.0, 0.0, ph) == doctest::Approx(-0.5 * (M * M - K)).epsilon(1e-12));
}

TEST_CASE("analytic derivatives match finite differences") {
    for (const auto& s : {sphere_surface(1.5), cylinder_surface(0.7), torus_surface(2.0, 0.5)})
        CHECK(derivative_mismatch(s, 0.9, 1.3) < 1e-6);
}

TEST_CASE("fallback derivatives") {
    ParametricSurface bare;
    bare.name = "bare sphere";
    bare.r = [](double u, double v) {
        return Vec3{std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)};
    };
    bare.u_min = 0;
    bare.u_max = M_PI;
    bare.v_min = 0;
    bare.v_max = 2 * M_PI;
    auto c = curvatures(bare, 1.0, 0.5);
    CHECK(c.M == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(c.K == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("degenerate parametrization") {
    try {
        curvatures(sphere_surface(1.0), 0.0, 0.3);
        FAIL("pole accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_metric);
    }
}

TEST_CASE("geometric potential is never positive") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    PhysParams ph;
    for (const auto& s : {sphere_surface(1.3), cylinder_surface(0.8), torus_surface(2.0, 0.7)}) {
        for (int i = 0; i < 2000; ++i) {
            double u = s.u_min + (s.u_max - s.u_min) * u01(rng);
            double v = s.v_min + (s.v_max - s.v_min) * u01(rng);
            if (s.name == "sphere") u = 1e-3 + (M_PI - 2e-3) * u01(rng);
            CHECK(geometric_potential(s, u, v, ph) <= 0.0);
        }
    }
}

TEST_CASE("Laplace-Beltrami eigenvalues") {
    CHECK(laplace_beltrami(spherical_harmonic_state(4, 1.0, 0, 0)).at(0, 0) == cplx(0, 0));
    auto y10 = laplace_beltrami(spherical_harmonic_state(4, 1.0, 1, 0));
    auto ref = spherical_harmonic_state(4, 1.0, 1, 0);
    CHECK(y10.at(1, 0).real() == doctest::Approx(-2.0 * ref.at(1, 0).real()));
    auto y53 = laplace_beltrami(spherical_harmonic_state(8, 2.0, 5, 3));
    auto r53 = spherical_harmonic_state(8, 2.0, 5, 3);
    CHECK((y53.at(5, 3) / r53.at(5, 3)).real() == doctest::Approx(-7.5).epsilon(1e-14));
}

TEST_CASE("sampled harmonics re-analyze to eigenfunctions") {
    const int lmax = 12;
    auto g = make_sphere_grid(lmax);
    for (int l = 0; l <= lmax / 2; ++l)
        for (int m = -l; m <= l; ++m) {
            auto s = spherical_harmonic_state(lmax, 1.7, l, m);
            auto back = analyze(synthesize(s, g), g, lmax, 1.7);
            auto lb = laplace_beltrami(back);
            const double expect = -l * (l + 1) / (1.7 * 1.7);
            double err = 0;
            for (size_t i = 0; i < back.c.size(); ++i) err = std::max(err, std::abs(lb.c[i] - expect * back.c[i]));
            CHECK(err <= 1e-9 * std::max(1.0, std::abs(expect)) * std::abs(s.at(l, m)));
            CHECK(std::abs(back.at(l, m) - s.at(l, m)) < 1e-12);
        }
}

TEST_CASE("synthesis agrees with the closed form of Y_1^1") {
    auto g = make_sphere_grid(4);
    auto s = spherical_harmonic_state(4, 1.0, 1, 1);
    auto vals = synthesize(s, g);
    const double c = 1.0 / s.R * -std::sqrt(3.0 / (8 * M_PI));  // Condon-Shortley sign
    for (int i = 0; i < g.nlat; ++i)
        for (int j = 0; j < g.nlon; ++j) {
            const cplx expect = c * std::sin(g.theta[i]) * std::exp(cplx(0, g.phi[j]));
            CHECK(std::abs(vals[static_cast<size_t>(i) * g.nlon + j] - expect) < 1e-13);
        }
}

TEST_CASE("spectral propagation") {
    PhysParams p;
    auto y10 = spherical_harmonic_state(4, 1.0, 1, 0);
    auto s = step_sphere_schrodinger(y10, 0.3, p);
    CHECK(std::abs(s.at(1, 0) / y10.at(1, 0) - std::exp(cplx(0, -0.3))) < 1e-15);
    auto y00 = spherical_harmonic_state(4, 1.0, 0, 0);
    CHECK(step_sphere_schrodinger(y00, 5.0, p).at(0, 0) == y00.at(0, 0));
    CHECK(sphere_energy(2, 1.0, p) == 3.0);
    CHECK(sphere_energy(3, 2.0, p) == 1.5);

    auto mix = make_sphere_state(4, 1.0);
    mix.at(1, 0) = 1.0;
    mix.at(2, 0) = 1.0;
    normalize(mix);
    auto at_pi = step_sphere_schrodinger(mix, M_PI, p);
    // revival up to the global phase exp(-i E1 pi)
    CHECK(std::abs(std::abs(sphere_overlap(mix, at_pi)) - 1.0) < 1e-14);
    auto half = step_sphere_schrodinger(mix, M_PI / 2, p);
    CHECK(std::abs(sphere_overlap(mix, half)) < 1e-14);
    CHECK(std::abs(sphere_norm(at_pi) - 1.0) < 1e-15);
}

TEST_CASE("sphere hydrodynamic fields") {
    PhysParams p;
    auto g = make_sphere_grid(6);
    const double R = 1.3;
    auto h00 = sphere_to_hydro(spherical_harmonic_state(6, R, 0, 0), g, p);
    for (size_t k = 0; k < h00.rho.size(); ++k) {
        CHECK(h00.rho[k] == doctest::Approx(1.0 / (4 * M_PI * R * R)).epsilon(1e-13));
        CHECK(h00.tangent.v_theta[k] == 0.0);
        CHECK(std::abs(h00.tangent.v_phi[k]) < 1e-15);
    }
    auto h10 = sphere_to_hydro(spherical_harmonic_state(6, R, 1, 0), g, p);
    for (size_t k = 0; k < h10.rho.size(); ++k) {
        CHECK(std::abs(h10.tangent.v_theta[k]) < 1e-15);
        CHECK(std::abs(h10.tangent.v_phi[k]) < 1e-15);
    }
    // Y_1^1 ~ sin theta e^{i phi}: v_phi = hbar / (m R sin theta), v_theta = 0
    auto h11 = sphere_to_hydro(spherical_harmonic_state(6, R, 1, 1), g, p);
    for (int i = 0; i < g.nlat; ++i)
        for (int j = 0; j < g.nlon; ++j) {
            const size_t k = static_cast<size_t>(i) * g.nlon + j;
            CHECK(std::abs(h11.tangent.v_theta[k]) < 1e-13);
            CHECK(h11.tangent.v_phi[k] == doctest::Approx(p.hbar / (p.m * R * std::sin(g.theta[i]))).epsilon(1e-12));
        }
}
