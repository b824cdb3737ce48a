#include "doctest.h"

#include <cmath>

#include "qgauss/constraint.hpp"
#include "qgauss/error.hpp"
#include "qgauss/states.hpp"
#include "qgauss/surface.hpp"

using namespace qgauss;

namespace {

Grid1D wide() { return make_grid(256, -20.0, 40.0); }

HydroState normal_at_rest(const Grid1D& g) {
    return to_hydro(gaussian_packet(g, 0.0, 1.0), PhysParams{});
}

double sup(const RealField& f, double lo = -1e300, double hi = 1e300) {
    double e = 0;
    for (size_t j = 0; j < f.size(); ++j) {
        const double x = f.grid.x(static_cast<int>(j));
        if (x >= lo && x <= hi) e = std::max(e, std::abs(f[j]));
    }
    return e;
}

}  // namespace

TEST_CASE("material derivative") {
    auto g = wide();
    RealField rho(g, 1.0 / 40);
    {
        HydroState s{rho, RealField(g, 0.7), std::nullopt};
        CHECK(sup(material_derivative(s, RealField(g))) < 1e-14);
    }
    {
        // v = x inside a smooth envelope; compared with the analytic v v'
        auto env = [](double x) { return std::exp(-std::pow(x / 8.0, 8)); };
        auto v = sample(g, [&](double x) { return x * env(x); });
        HydroState s{rho, v, std::nullopt};
        auto d = material_derivative(s, RealField(g));
        double e = 0, lin = 0;
        for (size_t j = 0; j < d.size(); ++j) {
            const double x = g.x(static_cast<int>(j));
            const double dv = env(x) * (1 - 8 * std::pow(x / 8.0, 8));
            e = std::max(e, std::abs(d[j] - x * env(x) * dv));
            if (std::abs(x) < 1) lin = std::max(lin, std::abs(d[j] - x));
        }
        CHECK(e < 1e-8);
        CHECK(lin < 1e-6);
    }
    {
        const double k = 2 * M_PI / 40;
        auto v = sample(g, [&](double x) { return std::sin(k * x); });
        HydroState s{rho, v, std::nullopt};
        auto d = material_derivative(s, RealField(g, 1.0));
        double e = 0;
        for (size_t j = 0; j < d.size(); ++j) {
            const double x = g.x(static_cast<int>(j));
            e = std::max(e, std::abs(d[j] - (1 + std::sin(k * x) * k * std::cos(k * x))));
        }
        CHECK(e < 1e-12);
    }
}

TEST_CASE("Z at and around the minimizer") {
    auto g = wide();
    PhysParams p;
    auto s = normal_at_rest(g);
    auto f = make_force(zero_potential(g), p);
    auto a = minimize_Z(s, f, p);
    CHECK(evaluate_Z(a, s, f, p) < 1e-18);
    auto shifted = a;
    for (auto& x : shifted.values) x += 0.3;
    CHECK(evaluate_Z(shifted, s, f, p) == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(evaluate_Z(RealField(g), s, f, p) == doctest::Approx(0.0625).epsilon(1e-9));
}

TEST_CASE("minimizer closed forms") {
    auto g = wide();
    PhysParams p;
    {
        auto s = normal_at_rest(g);
        auto a = minimize_Z(s, make_force(zero_potential(g), p), p);
        double e = 0;
        for (size_t j = 0; j < a.size(); ++j) {
            const double x = g.x(static_cast<int>(j));
            if (std::abs(x) < 6) e = std::max(e, std::abs(a[j] - x / 4));
        }
        CHECK(e < 1e-8);
    }
    {
        auto s = to_hydro(harmonic_ground_state(g, p), p);
        auto a = minimize_Z(s, make_force(harmonic_potential(g, p.m, p.omega0), p), p);
        double e = 0;
        for (size_t j = 0; j < a.size(); ++j)
            if (s.rho[j] > density_floor(s.rho)) e = std::max(e, std::abs(a[j]));
        CHECK(e < 1e-7);
    }
    {
        auto g2 = make_grid(64, 0.0, 10.0);
        const double k = 2 * M_PI * 2 / 10.0;
        auto pw = sample_complex(g2, [&](double x) { return std::exp(cplx(0, k * x)) / std::sqrt(10.0); });
        auto s = to_hydro(pw, p);
        CHECK(sup(minimize_Z(s, make_force(zero_potential(g2), p), p)) < 1e-12);
    }
}

TEST_CASE("Z gradient matches finite differences") {
    auto g = make_grid(64, -8.0, 16.0);
    PhysParams p;
    p.gamma = 0.3;
    auto s = to_hydro(gaussian_packet(g, 0.5, 1.0, 0.8), p);
    auto f = make_force(harmonic_potential(g, p.m, p.omega0), p);
    RealField a(g, 0.2);
    auto grad = Z_gradient(a, s, f, p);
    for (int j : {20, 32, 40}) {
        const double h = 1e-5;
        auto ap = a, am = a;
        ap[j] += h;
        am[j] -= h;
        const double fd = (evaluate_Z(ap, s, f, p) - evaluate_Z(am, s, f, p)) / (2 * h);
        CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("random perturbation certificate") {
    auto g = wide();
    PhysParams p;
    Potential V;
    auto psi = two_bump_state(g, -1.5, 1.5, 1.0, 0.7);
    auto s = to_hydro(psi, p);
    auto f = make_force(zero_potential(g), p);
    auto rep = verify_minimum(s, f, p, 100, 1e-3, 42);
    CHECK(rep.pass);
    CHECK(rep.nonnegative == 100);
    CHECK(rep.worst_quadratic_error < 1e-8);

    std::vector<MinimumTrial> detail;
    auto zero = verify_minimum(s, f, p, 5, 0.0, 42, &detail);
    for (const auto& t : detail) CHECK(t.margin == 0.0);
    CHECK(zero.nonnegative == 5);
}

TEST_CASE("perturbations are seeded and bounded") {
    auto g = wide();
    std::uint64_t a = 7, b = 7;
    auto d1 = band_limited_perturbation(g, a);
    auto d2 = band_limited_perturbation(g, b);
    CHECK(d1.values == d2.values);
    CHECK(sup(d1) == doctest::Approx(1.0));
    auto d3 = band_limited_perturbation(g, a);
    CHECK(d3.values != d1.values);
}

TEST_CASE("perturbations below the floor are flat directions") {
    auto g = wide();
    PhysParams p;
    auto s = normal_at_rest(g);
    auto f = make_force(zero_potential(g), p);
    auto a = minimize_Z(s, f, p);
    const double fl = density_floor(s.rho);
    RealField d(g);
    for (size_t j = 0; j < d.size(); ++j)
        if (s.rho[j] < fl) d[j] = std::sin(0.3 * j);
    const double eps = 1e-2;
    auto ap = a;
    for (size_t j = 0; j < a.size(); ++j) ap[j] += eps * d[j];
    double d2 = 0;
    for (double x : d.values) d2 += x * x;
    d2 *= g.dx();
    CHECK(evaluate_Z(ap, s, f, p) - evaluate_Z(a, s, f, p) <= eps * eps * fl * d2);
}

TEST_CASE("tangent minimizer on the sphere") {
    PhysParams p;
    auto grid = make_sphere_grid(6);
    {
        auto h = sphere_to_hydro(spherical_harmonic_state(6, 1.0, 0, 0), grid, p);
        auto tm = minimize_Z_tangent(h.tangent, SurfaceForce{}, p);
        for (size_t i = 0; i < tm.a_theta.size(); ++i) {
            CHECK(std::abs(tm.a_theta[i]) < 1e-12);
            CHECK(std::abs(tm.a_phi[i]) < 1e-12);
        }
        CHECK(evaluate_Z_tangent(tm.a_theta, tm.a_phi, h.tangent, SurfaceForce{}, p) ==
              doctest::Approx(tm.residual).epsilon(1e-14));
    }
    {
        // psi = Y00 + 0.3 Y10 at rest: Q = c cos/(1 + c cos) with c = 0.3 sqrt 3, so
        // a_theta = -Q_theta/m = c sin/(1 + c cos)^2
        auto st = make_sphere_state(6, 1.0);
        st.at(0, 0) = 1.0;
        st.at(1, 0) = 0.3;
        normalize(st);
        auto h = sphere_to_hydro(st, grid, p);
        auto tm = minimize_Z_tangent(h.tangent, SurfaceForce{}, p);
        const double c = 0.3 * std::sqrt(3.0);
        double e = 0;
        for (int i = 0; i < grid.nlat; ++i)
            for (int j = 0; j < grid.nlon; ++j) {
                const size_t k = static_cast<size_t>(i) * grid.nlon + j;
                const double th = grid.theta[i];
                const double expect = c * std::sin(th) / std::pow(1 + c * std::cos(th), 2);
                e = std::max(e, std::abs(tm.a_theta[k] - expect));
                e = std::max(e, std::abs(tm.a_phi[k]));
            }
        CHECK(e < 1e-12);
        std::vector<double> at = tm.a_theta, ap = tm.a_phi;
        for (auto& x : at) x += 0.1;
        CHECK(evaluate_Z_tangent(at, ap, h.tangent, SurfaceForce{}, p) > tm.residual);
    }
}

TEST_CASE("tangent minimizer rejects normal velocity") {
    TangentState t;
    t.weight = {1.0};
    t.rho = {1.0};
    t.v_theta = {0.0};
    t.v_phi = {0.0};
    t.v_normal = {0.5};
    t.conv_theta = t.conv_phi = t.conv_normal = {0.0};
    t.gradq_theta = t.gradq_phi = t.gradq_normal = {0.0};
    t.gradv_theta = t.gradv_phi = t.gradv_normal = {0.0};
    CHECK_THROWS_AS(minimize_Z_tangent(t, SurfaceForce{}, PhysParams{}), Error);
}
