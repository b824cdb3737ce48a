#include "qgauss/constraint.hpp"

#include <algorithm>
#include <cmath>

#include "qgauss/error.hpp"
#include "qgauss/stencil.hpp"

namespace qgauss {

Potential zero_potential(const Grid1D& g) { return {RealField(g), RealField(g)}; }

Potential harmonic_potential(const Grid1D& g, double m, double omega0, double center) {
    const double k = m * omega0 * omega0;
    return {sample(g, [&](double x) { return 0.5 * k * (x - center) * (x - center); }),
            sample(g, [&](double x) { return k * (x - center); })};
}

Potential polynomial_potential(const Grid1D& g, const std::vector<double>& c) {
    auto value = [&](double x) {
        double s = 0.0;
        for (size_t i = c.size(); i-- > 0;) s = s * x + c[i];
        return s;
    };
    auto grad = [&](double x) {
        double s = 0.0;
        for (size_t i = c.size(); i-- > 1;) s = s * x + i * c[i];
        return s;
    };
    return {sample(g, value), sample(g, grad)};
}

Potential sampled_potential(const RealField& V) {
    FiniteDifference fd(V.grid.n(), V.grid.dx(), 6, 1);
    return {V, RealField(V.grid, fd.apply(V.values, 1))};
}

ForceModel make_force(const Potential& V, const PhysParams& p, bool include_quantum) {
    return ForceModel{V, p.gamma, include_quantum};
}

namespace {

void check_state(const HydroState& s) { require_same_grid(s.rho.grid, s.v.grid, "rho vs v"); }

struct Terms {
    RealField dv;
    RealField dq;
};

Terms kinematic_terms(const HydroState& state, const ForceModel& f, const PhysParams& p) {
    check_state(state);
    require_same_grid(state.rho.grid, f.V.gradient.grid, "state vs potential");
    if (f.gamma < 0) throw Error(ErrorKind::invalid_argument, "gamma must be non-negative");
    Terms t{derivative(state.v, 1), RealField(state.rho.grid)};
    if (f.include_quantum) t.dq = quantum_force(state.rho, p);
    return t;
}

}  // namespace

RealField material_derivative(const HydroState& state, const AccelerationField& a) {
    check_state(state);
    require_same_grid(state.v.grid, a.grid, "state vs acceleration");
    RealField dv = derivative(state.v, 1);
    RealField out(a.grid);
    for (size_t j = 0; j < out.size(); ++j) out[j] = a[j] + state.v[j] * dv[j];
    return out;
}

RealField constraint_residual(const AccelerationField& a, const HydroState& state, const ForceModel& f,
                              const PhysParams& p) {
    require_same_grid(state.v.grid, a.grid, "state vs acceleration");
    Terms t = kinematic_terms(state, f, p);
    RealField r(a.grid);
    for (size_t j = 0; j < r.size(); ++j)
        r[j] = a[j] - least_constraint_acceleration(state.v[j], t.dv[j], f.V.gradient[j], t.dq[j], f.gamma, p.m);
    return r;
}

double evaluate_Z(const AccelerationField& a, const HydroState& state, const ForceModel& f,
                  const PhysParams& p) {
    RealField r = constraint_residual(a, state, f, p);
    double s = 0.0;
    for (size_t j = 0; j < r.size(); ++j) s += state.rho[j] * r[j] * r[j];
    return s * a.grid.dx();
}

RealField Z_gradient(const AccelerationField& a, const HydroState& state, const ForceModel& f,
                     const PhysParams& p) {
    RealField r = constraint_residual(a, state, f, p);
    for (size_t j = 0; j < r.size(); ++j) r[j] *= 2.0 * state.rho[j] * a.grid.dx();
    return r;
}

AccelerationField minimize_Z(const HydroState& state, const ForceModel& f, const PhysParams& p) {
    Terms t = kinematic_terms(state, f, p);
    AccelerationField a(state.rho.grid);
    for (size_t j = 0; j < a.size(); ++j)
        a[j] = least_constraint_acceleration(state.v[j], t.dv[j], f.V.gradient[j], t.dq[j], f.gamma, p.m);
    return a;
}

namespace {

// splitmix64; fixed arithmetic so perturbations are identical on every platform
std::uint64_t next_u64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform_pm1(std::uint64_t& s) { return 2.0 * (next_u64(s) >> 11) * 0x1.0p-53 - 1.0; }

}  // namespace

RealField band_limited_perturbation(const Grid1D& g, std::uint64_t& rng) {
    const int n = g.n();
    const int modes = std::max(1, n / 4);
    std::vector<double> amp(modes + 1), phase(modes + 1);
    for (int k = 0; k <= modes; ++k) {
        amp[k] = uniform_pm1(rng);
        phase[k] = M_PI * uniform_pm1(rng);
    }
    RealField d(g);
    double sup = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = amp[0];
        for (int k = 1; k < modes; ++k) s += amp[k] * std::cos(2.0 * M_PI * k * j / n + phase[k]);
        d[j] = s;
        sup = std::max(sup, std::abs(s));
    }
    if (sup == 0.0) {
        for (auto& v : d.values) v = 1.0;
        return d;
    }
    for (auto& v : d.values) v /= sup;
    return d;
}

MinimumReport verify_minimum(const HydroState& state, const ForceModel& f, const PhysParams& p,
                             int trials, double epsilon, std::uint64_t seed,
                             std::vector<MinimumTrial>* detail) {
    if (trials < 1) throw Error(ErrorKind::invalid_argument, "trials must be >= 1");
    if (!(epsilon >= 0)) throw Error(ErrorKind::invalid_argument, "epsilon must be non-negative");
    AccelerationField a = minimize_Z(state, f, p);
    MinimumReport rep;
    rep.trials = trials;
    rep.z_at_minimum = evaluate_Z(a, state, f, p);
    rep.worst_margin = INFINITY;
    std::uint64_t rng = seed;
    for (int t = 0; t < trials; ++t) {
        RealField d = band_limited_perturbation(a.grid, rng);
        AccelerationField ap(a.grid);
        double expected = 0.0;
        for (size_t j = 0; j < ap.size(); ++j) {
            ap[j] = a[j] + epsilon * d[j];
            expected += state.rho[j] * d[j] * d[j];
        }
        expected *= epsilon * epsilon * a.grid.dx();
        const double margin = evaluate_Z(ap, state, f, p) - rep.z_at_minimum;
        if (margin >= 0) ++rep.nonnegative;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        double err = 0.0;
        if (expected > 0) err = std::abs(margin - expected) / expected;
        else if (margin != 0) err = INFINITY;
        rep.worst_quadratic_error = std::max(rep.worst_quadratic_error, err);
        if (detail) detail->push_back({margin, expected, err});
    }
    rep.pass = rep.nonnegative == trials && rep.worst_quadratic_error < 1e-8;
    return rep;
}

namespace {

void check_tangent(const TangentState& s) {
    const size_t n = s.size();
    const std::vector<double>* all[] = {&s.weight, &s.v_theta, &s.v_phi, &s.v_normal,
                                        &s.conv_theta, &s.conv_phi, &s.conv_normal,
                                        &s.gradq_theta, &s.gradq_phi, &s.gradq_normal,
                                        &s.gradv_theta, &s.gradv_phi, &s.gradv_normal};
    for (auto* v : all)
        if (v->size() != n) throw Error(ErrorKind::grid_mismatch, "tangent state fields differ in size");
    double vmax = 0.0;
    for (size_t i = 0; i < n; ++i) vmax = std::max({vmax, std::abs(s.v_theta[i]), std::abs(s.v_phi[i])});
    for (size_t i = 0; i < n; ++i)
        if (std::abs(s.v_normal[i]) > 1e-12 * (1.0 + vmax))
            throw Error(ErrorKind::invalid_argument, "normal velocity must vanish on the surface");
}

struct Reference {
    double theta, phi, normal;
};

// Unconstrained reference acceleration -(v.grad)v - (grad V + gamma v + grad Q)/m at sample i.
Reference reference(const TangentState& s, size_t i, const SurfaceForce& f, const PhysParams& p) {
    const double q = f.include_quantum ? 1.0 : 0.0;
    return {-s.conv_theta[i] - (s.gradv_theta[i] + f.gamma * s.v_theta[i] + q * s.gradq_theta[i]) / p.m,
            -s.conv_phi[i] - (s.gradv_phi[i] + f.gamma * s.v_phi[i] + q * s.gradq_phi[i]) / p.m,
            -s.conv_normal[i] - (s.gradv_normal[i] + q * s.gradq_normal[i]) / p.m};
}

}  // namespace

TangentMinimum minimize_Z_tangent(const TangentState& state, const SurfaceForce& f, const PhysParams& p) {
    check_tangent(state);
    TangentMinimum out;
    out.a_theta.resize(state.size());
    out.a_phi.resize(state.size());
    for (size_t i = 0; i < state.size(); ++i) {
        Reference r = reference(state, i, f, p);
        out.a_theta[i] = r.theta;
        out.a_phi[i] = r.phi;
        out.residual += state.weight[i] * state.rho[i] * r.normal * r.normal;
    }
    return out;
}

double evaluate_Z_tangent(const std::vector<double>& a_theta, const std::vector<double>& a_phi,
                          const TangentState& state, const SurfaceForce& f, const PhysParams& p) {
    check_tangent(state);
    if (a_theta.size() != state.size() || a_phi.size() != state.size())
        throw Error(ErrorKind::grid_mismatch, "acceleration size mismatch");
    double z = 0.0;
    for (size_t i = 0; i < state.size(); ++i) {
        Reference r = reference(state, i, f, p);
        const double dt = a_theta[i] - r.theta, dp = a_phi[i] - r.phi;
        z += state.weight[i] * state.rho[i] * (dt * dt + dp * dp + r.normal * r.normal);
    }
    return z;
}

}  // namespace qgauss
