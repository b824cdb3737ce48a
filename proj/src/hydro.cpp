#include "qgauss/hydro.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "qgauss/error.hpp"

namespace qgauss {

namespace {

const double kLogFloor = 0.5 * std::log(kFloorFraction);

void check_normalized(const RealField& rho) {
    const double nrm = integrate(rho);
    if (std::abs(nrm - 1.0) > 1e-6) throw Error(ErrorKind::invalid_argument, "hydro state is not normalized");
}

}  // namespace

HydroRates hydro_rhs(const HydroState& state, const ForceModel& f, const PhysParams& p) {
    p.validate();
    require_same_grid(state.rho.grid, state.v.grid, "rho vs v");
    check_normalized(state.rho);
    RealField flux(state.rho.grid);
    for (size_t j = 0; j < flux.size(); ++j) flux[j] = state.rho[j] * state.v[j];
    RealField drho = derivative(flux, 1);
    for (auto& x : drho.values) x = -x;
    return {std::move(drho), minimize_Z(state, f, p)};
}

double stability_bound(const Grid1D& g, const PhysParams& p, double C) {
    return C * p.m * g.dx() * g.dx() / p.hbar;
}

double hydro_energy(const HydroState& state, const ForceModel& f, const PhysParams& p) {
    const Grid1D& g = state.rho.grid;
    double e = 0.0;
    for (size_t j = 0; j < state.rho.size(); ++j)
        e += state.rho[j] * (0.5 * p.m * state.v[j] * state.v[j] + f.V.values[j]);
    e *= g.dx();
    if (f.include_quantum) {
        std::vector<cplx> amp(state.rho.size());
        for (size_t j = 0; j < amp.size(); ++j) amp[j] = std::sqrt(std::max(state.rho[j], 0.0));
        auto d = g.spectral_derivatives(amp, 1);
        double q = 0.0;
        for (const auto& z : d[0]) q += z.real() * z.real();
        e += p.hbar * p.hbar / (2.0 * p.m) * q * g.dx();
    }
    return e;
}

HydroDiagnostics hydro_diagnostics(const HydroState& state, const ForceModel& f, const PhysParams& p) {
    const Grid1D& g = state.rho.grid;
    HydroDiagnostics d;
    double x2 = 0.0;
    for (size_t j = 0; j < state.rho.size(); ++j) {
        const double r = state.rho[j], x = g.x(static_cast<int>(j));
        d.norm += r;
        d.x_mean += r * x;
        x2 += r * x * x;
        d.p_mean += r * state.v[j];
        d.kinetic += 0.5 * r * state.v[j] * state.v[j];
    }
    const double dx = g.dx();
    d.norm *= dx;
    d.x_mean *= dx / d.norm;
    d.variance = x2 * dx / d.norm - d.x_mean * d.x_mean;
    d.p_mean *= p.m * dx;
    d.kinetic *= dx;
    d.energy = hydro_energy(state, f, p);
    d.floored_measure = floored_measure(state.rho);
    if (state.s) {
        FiniteDifference fd(g.n(), dx, 6, 1);
        auto ds = fd.apply(state.s->values, 1);
        const double fl = density_floor(state.rho);
        for (size_t j = 0; j < ds.size(); ++j)
            if (state.rho[j] > fl) d.irrotationality = std::max(d.irrotationality, std::abs(state.v[j] - ds[j] / p.m));
    }
    return d;
}

HydroIntegrator::HydroIntegrator(const HydroState& initial, const ForceModel& f, const PhysParams& p,
                                 double stability_c)
    : grid_(initial.rho.grid), force_(f), p_(p), c_(stability_c) {
    p.validate();
    require_same_grid(initial.rho.grid, initial.v.grid, "rho vs v");
    require_same_grid(initial.rho.grid, f.V.values.grid, "state vs potential");
    if (f.gamma < 0) throw Error(ErrorKind::invalid_argument, "gamma must be non-negative");
    check_normalized(initial.rho);
    const int n = grid_.n();
    if (n < 4 * fit_points) throw Error(ErrorKind::invalid_argument, "grid too coarse for the hydro solver");
    fd_ = FiniteDifference(n, grid_.dx(), 6, 3);

    y_.l.resize(n);
    y_.v = initial.v.values;
    for (int j = 0; j < n; ++j) y_.l[j] = 0.5 * std::log(std::max(initial.rho[j], 1e-300));
    if (initial.s) {
        y_.s = initial.s->values;
    } else {
        // no phase supplied: integrate m v with the trapezoid rule
        y_.s.assign(n, 0.0);
        for (int j = 1; j < n; ++j) y_.s[j] = y_.s[j - 1] + 0.5 * p.m * (y_.v[j] + y_.v[j - 1]) * grid_.dx();
    }
    int lo, hi;
    support(y_, lo, hi);
    extrapolate(y_, lo, hi);
}

void HydroIntegrator::support(const Fields& y, int& lo, int& hi) const {
    const int n = grid_.n();
    const double lmax = *std::max_element(y.l.begin(), y.l.end());
    lo = n;
    hi = -1;
    for (int j = 0; j < n; ++j)
        if (y.l[j] - lmax >= kLogFloor) {
            lo = std::min(lo, j);
            hi = j;
        }
    if (hi - lo + 1 < 2 * fit_points)
        throw Error(ErrorKind::degenerate_state, "support too narrow for the grid");
}

void HydroIntegrator::extrapolate(Fields& y, int lo, int hi) const {
    const int n = grid_.n();
    const int K = fit_points;
    auto fit = [&](const std::vector<double>& f, int first, int degree, int anchor) {
        Eigen::MatrixXd A(K, degree + 1);
        Eigen::VectorXd b(K);
        for (int i = 0; i < K; ++i) {
            const double z = first + i - anchor;
            double pw = 1.0;
            for (int d = 0; d <= degree; ++d, pw *= z) A(i, d) = pw;
            b(i) = f[first + i];
        }
        return Eigen::VectorXd(A.colPivHouseholderQr().solve(b));
    };
    auto eval = [](const Eigen::VectorXd& c, double z) {
        double s = 0.0;
        for (int d = static_cast<int>(c.size()) - 1; d >= 0; --d) s = s * z + c(d);
        return s;
    };
    auto fill = [&](int first, int anchor, int from, int to) {
        const Eigen::VectorXd cl = fit(y.l, first, 2, anchor);
        const Eigen::VectorXd cs = fit(y.s, first, 2, anchor);
        const Eigen::VectorXd cv = fit(y.v, first, 1, anchor);
        const double ledge = y.l[anchor];
        for (int j = from; j < to; ++j) {
            const double z = j - anchor;
            // never let the tail rise above the edge of the support
            y.l[j] = std::min(eval(cl, z), ledge);
            y.s[j] = eval(cs, z);
            y.v[j] = eval(cv, z);
        }
    };
    if (lo > 0) fill(lo, lo, 0, lo);
    if (hi < n - 1) fill(hi - K + 1, hi, hi + 1, n);
}

void HydroIntegrator::rates(const Fields& y, const std::vector<char>& mask, Fields& k) const {
    const int n = grid_.n();
    const double hb = p_.hbar, m = p_.m, g = force_.gamma;
    std::vector<cplx> psi(n);
    for (int j = 0; j < n; ++j) psi[j] = std::exp(cplx(y.l[j], y.s[j] / hb));
    auto d = grid_.spectral_derivatives(psi, 2);

    std::vector<double> l1(n), l2(n), l3(n), v1(n);
    fd_.apply(y.l.data(), l1.data(), 1);
    fd_.apply(y.l.data(), l2.data(), 2);
    fd_.apply(y.l.data(), l3.data(), 3);
    fd_.apply(y.v.data(), v1.data(), 1);

    const double c = hb * hb / (2.0 * m);
    const auto& V = force_.V.values;
    const auto& dV = force_.V.gradient;
    k.l.assign(n, 0.0);
    k.v.assign(n, 0.0);
    k.s.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (!mask[j]) continue;
        const cplx r2 = d[1][j] / psi[j];
        // continuity: l_t = -(v l' + v'/2) = -(hbar/2m) Im(psi''/psi)
        k.l[j] = -(hb / (2.0 * m)) * r2.imag();
        double dq = 0.0;
        if (force_.include_quantum) {
            // Hamilton-Jacobi: s_t = -(m v^2/2 + V + Q) - gamma s/m = (hbar^2/2m) Re(psi''/psi) - V - ...
            k.s[j] = c * r2.real() - V[j] - g * y.s[j] / m;
            dq = -c * (l3[j] + 2.0 * l1[j] * l2[j]);
        } else {
            const double vs = (hb / m) * (d[0][j] / psi[j]).imag();
            k.s[j] = -0.5 * m * vs * vs - V[j] - g * y.s[j] / m;
        }
        k.v[j] = least_constraint_acceleration(y.v[j], v1[j], dV[j], dq, g, m);
    }
}

void HydroIntegrator::check(const Fields& y, int lo, int hi) const {
    const int n = grid_.n();
    const double lmax = *std::max_element(y.l.begin(), y.l.end());
    const double rmax = std::exp(2.0 * lmax);
    for (int j = 0; j < n; ++j) {
        const double r = std::exp(2.0 * y.l[j]);
        for (double x : {r, y.v[j], y.s[j]})
            if (!std::isfinite(x) || std::abs(x) > 1e12)
                throw Error(ErrorKind::blow_up, "hydro field left [-1e12, 1e12] at x = " + std::to_string(grid_.x(j)));
    }
    const double fl = kFloorFraction * rmax;
    for (int j = lo; j <= hi; ++j) {
        const double r = std::exp(2.0 * y.l[j]);
        if (r < 1e3 * fl && std::abs(y.v[j]) > 1e3)
            throw Error(ErrorKind::caustic, "incipient caustic at x = " + std::to_string(grid_.x(j)));
    }
}

void HydroIntegrator::step(double dt, StepLog* log) {
    const double bound = stability_bound(grid_, p_, c_);
    if (!(dt > 0)) throw Error(ErrorKind::invalid_argument, "time step must be positive");
    if (dt > bound * (1.0 + 1e-12))
        throw Error(ErrorKind::stability_violation,
                    "dt = " + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound));
    const int n = grid_.n();
    int lo, hi;
    support(y_, lo, hi);
    // the support is frozen for the whole step so every stage sees the same closure
    std::vector<char> mask(n, 0);
    for (int j = lo; j <= hi; ++j) mask[j] = 1;

    Fields k1, k2, k3, k4, tmp;
    auto advance = [&](const Fields& k, double h) {
        tmp = y_;
        for (int j = 0; j < n; ++j) {
            tmp.l[j] += h * k.l[j];
            tmp.v[j] += h * k.v[j];
            tmp.s[j] += h * k.s[j];
        }
        extrapolate(tmp, lo, hi);
    };
    rates(y_, mask, k1);
    advance(k1, 0.5 * dt);
    rates(tmp, mask, k2);
    advance(k2, 0.5 * dt);
    rates(tmp, mask, k3);
    advance(k3, dt);
    rates(tmp, mask, k4);
    for (int j = 0; j < n; ++j) {
        y_.l[j] += dt / 6.0 * (k1.l[j] + 2.0 * k2.l[j] + 2.0 * k3.l[j] + k4.l[j]);
        y_.v[j] += dt / 6.0 * (k1.v[j] + 2.0 * k2.v[j] + 2.0 * k3.v[j] + k4.v[j]);
        y_.s[j] += dt / 6.0 * (k1.s[j] + 2.0 * k2.s[j] + 2.0 * k3.s[j] + k4.s[j]);
    }
    extrapolate(y_, lo, hi);
    t_ += dt;
    check(y_, lo, hi);

    double nrm = 0.0;
    for (int j = 0; j < n; ++j) nrm += std::exp(2.0 * y_.l[j]);
    nrm *= grid_.dx();
    if (log) *log = StepLog{};
    if (std::abs(nrm - 1.0) > 1e-12) {
        const double shift = 0.5 * std::log(nrm);
        for (auto& x : y_.l) x -= shift;
        if (log) *log = StepLog{true, nrm - 1.0};
    }
}

HydroState HydroIntegrator::state() const {
    const int n = grid_.n();
    RealField rho(grid_);
    for (int j = 0; j < n; ++j) rho[j] = std::exp(2.0 * y_.l[j]);
    return HydroState{std::move(rho), RealField(grid_, y_.v), RealField(grid_, y_.s)};
}

HydroState step_hydro(const HydroState& state, const ForceModel& f, const PhysParams& p, double dt,
                      StepLog* log) {
    HydroIntegrator it(state, f, p);
    it.step(dt, log);
    return it.state();
}

HydroTrajectory run_hydro(const HydroState& initial, const ForceModel& f, const PhysParams& p, double t_end,
                          double dt, int sample_every) {
    if (!(t_end >= 0)) throw Error(ErrorKind::invalid_argument, "t_end must be non-negative");
    if (sample_every < 1) throw Error(ErrorKind::invalid_argument, "sample_every must be >= 1");
    HydroIntegrator it(initial, f, p);
    if (!(dt > 0)) throw Error(ErrorKind::invalid_argument, "time step must be positive");
    const double bound = stability_bound(initial.rho.grid, p);
    if (dt > bound * (1.0 + 1e-12))
        throw Error(ErrorKind::stability_violation, "dt exceeds the stability bound");
    const long steps = t_end > 0 ? std::max(1L, static_cast<long>(std::ceil(t_end / dt - 1e-9))) : 0;
    const double h = steps > 0 ? t_end / steps : 0.0;
    HydroTrajectory tr;
    auto record = [&](double t) {
        HydroState s = it.state();
        tr.times.push_back(t);
        tr.diag.push_back(hydro_diagnostics(s, f, p));
        tr.states.push_back(std::move(s));
    };
    record(0.0);
    for (long k = 1; k <= steps; ++k) {
        StepLog lg;
        it.step(h, &lg);
        if (lg.renormalized) tr.corrections.push_back({k * h, lg.norm_correction});
        if (k % sample_every == 0 || k == steps) record(k * h);
    }
    return tr;
}

}  // namespace qgauss
