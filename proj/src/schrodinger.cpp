#include "qgauss/schrodinger.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

#include "qgauss/error.hpp"

namespace qgauss {

namespace {

const cplx I(0.0, 1.0);

void check_inputs(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt) {
    p.validate();
    require_same_grid(psi.grid, V.grid, "psi vs V");
    if (!std::isfinite(dt)) throw Error(ErrorKind::invalid_argument, "time step must be finite");
}

void kinetic_step(std::vector<cplx>& f, const Grid1D& g, const PhysParams& p, double dt) {
    const int n = g.n();
    std::vector<cplx> fh(n);
    g.forward(f.data(), fh.data());
    const auto& k = g.k();
    const double c = p.hbar / (2.0 * p.m);
    for (int j = 0; j < n; ++j) fh[j] *= std::exp(cplx(0.0, -c * k[j] * k[j] * dt)) / double(n);
    g.backward(fh.data(), f.data());
}

// Eighth-order central second difference, periodic.
constexpr double kLap8[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

using SpMat = Eigen::SparseMatrix<cplx>;

// Factorization of (1 + i tau H) with H = -(hbar^2/2m) L8 + V, kept per thread and reused while
// the grid, potential and step are unchanged.
struct CnCache {
    int n = 0;
    double dx = 0, dt = 0, hbar = 0, m = 0;
    std::vector<double> V;
    SpMat explicit_op;
    Eigen::SparseLU<SpMat> lu;
    bool ready = false;
};

CnCache& cn_factor(const Grid1D& g, const RealField& V, const PhysParams& p, double dt) {
    thread_local CnCache cache;
    if (cache.ready && cache.n == g.n() && cache.dx == g.dx() && cache.dt == dt && cache.hbar == p.hbar &&
        cache.m == p.m && cache.V == V.values)
        return cache;
    const int n = g.n();
    const double c = p.hbar * p.hbar / (2.0 * p.m) / (g.dx() * g.dx());
    const cplx it = I * (0.5 * dt / p.hbar);
    std::vector<Eigen::Triplet<cplx>> lhs, rhs;
    for (int j = 0; j < n; ++j) {
        for (int o = -4; o <= 4; ++o) {
            const int col = ((j + o) % n + n) % n;
            cplx h = -c * kLap8[std::abs(o)];
            if (o == 0) h += V[j];
            lhs.emplace_back(j, col, it * h + (o == 0 ? 1.0 : 0.0));
            rhs.emplace_back(j, col, -it * h + (o == 0 ? 1.0 : 0.0));
        }
    }
    SpMat A(n, n);
    A.setFromTriplets(lhs.begin(), lhs.end());
    cache.explicit_op.resize(n, n);
    cache.explicit_op.setFromTriplets(rhs.begin(), rhs.end());
    cache.lu.compute(A);
    if (cache.lu.info() != Eigen::Success) {
        cache.ready = false;
        throw Error(ErrorKind::linear_solve, "Crank-Nicolson factorization failed");
    }
    cache.n = n;
    cache.dx = g.dx();
    cache.dt = dt;
    cache.hbar = p.hbar;
    cache.m = p.m;
    cache.V = V.values;
    cache.ready = true;
    return cache;
}

}  // namespace

ComplexField schrodinger_rhs(const ComplexField& psi, const RealField& V, const PhysParams& p) {
    check_inputs(psi, V, p, 0.0);
    auto d = psi.grid.spectral_derivatives(psi.values, 2);
    const double c = p.hbar * p.hbar / (2.0 * p.m);
    ComplexField out(psi.grid);
    for (size_t j = 0; j < out.size(); ++j) out[j] = -I / p.hbar * (-c * d[1][j] + V[j] * psi[j]);
    return out;
}

ComplexField step_splitstep(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt) {
    check_inputs(psi, V, p, dt);
    std::vector<cplx> f = psi.values;
    const double h = 0.5 * dt / p.hbar;
    for (size_t j = 0; j < f.size(); ++j) f[j] *= std::exp(cplx(0.0, -V[j] * h));
    kinetic_step(f, psi.grid, p, dt);
    for (size_t j = 0; j < f.size(); ++j) f[j] *= std::exp(cplx(0.0, -V[j] * h));
    return ComplexField(psi.grid, std::move(f));
}

ComplexField step_crank_nicolson(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt) {
    check_inputs(psi, V, p, dt);
    CnCache& cn = cn_factor(psi.grid, V, p, dt);
    const int n = static_cast<int>(psi.size());
    Eigen::Map<const Eigen::VectorXcd> in(psi.values.data(), n);
    Eigen::VectorXcd r = cn.explicit_op * in;
    Eigen::VectorXcd out = cn.lu.solve(r);
    if (cn.lu.info() != Eigen::Success || !out.allFinite())
        throw Error(ErrorKind::linear_solve, "Crank-Nicolson solve failed");
    return ComplexField(psi.grid, std::vector<cplx>(out.data(), out.data() + n));
}

std::vector<double> kostin_action(const ComplexField& psi, const PhysParams& p) {
    const size_t n = psi.size();
    std::vector<double> rho(n);
    double mx = 0.0;
    for (size_t j = 0; j < n; ++j) {
        rho[j] = std::norm(psi[j]);
        mx = std::max(mx, rho[j]);
    }
    if (!(mx > 0) || !std::isfinite(mx)) throw Error(ErrorKind::degenerate_state, "wave function vanishes");
    const double fl = kFloorFraction * mx;
    size_t lo = n, hi = 0;
    for (size_t j = 0; j < n; ++j)
        if (rho[j] > 1e-6 * mx) {
            lo = std::min(lo, j);
            hi = j;
        }
    for (size_t j = lo; j <= hi; ++j)
        if (rho[j] < fl)
            throw Error(ErrorKind::degenerate_state, "node inside the support; phase is not single valued");
    // extend the support to the floor and hold the action constant beyond it
    while (lo > 0 && rho[lo - 1] > fl) --lo;
    while (hi + 1 < n && rho[hi + 1] > fl) ++hi;

    std::vector<double> s(n);
    double prev = std::arg(psi[lo]), acc = prev;
    s[lo] = acc;
    for (size_t j = lo + 1; j <= hi; ++j) {
        const double a = std::arg(psi[j]);
        double da = a - prev;
        da -= 2.0 * M_PI * std::round(da / (2.0 * M_PI));
        acc += da;
        prev = a;
        s[j] = acc;
    }
    for (size_t j = 0; j < lo; ++j) s[j] = s[lo];
    for (size_t j = hi + 1; j < n; ++j) s[j] = s[hi];
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < n; ++j) {
        num += rho[j] * s[j];
        den += rho[j];
    }
    const double mean = num / den;
    for (auto& v : s) v = p.hbar * (v - mean);
    return s;
}

ComplexField step_kostin(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt) {
    if (p.gamma == 0.0) return step_splitstep(psi, V, p, dt);
    check_inputs(psi, V, p, dt);
    // Each potential half step is solved exactly: with |psi| frozen the action obeys
    // S_t = -V - (gamma/m) S, so S relaxes towards -m V / gamma.
    const double h = 0.5 * dt;
    const double decay = std::exp(-p.gamma * h / p.m);
    auto potential_half = [&](std::vector<cplx>& f) {
        ComplexField cur(psi.grid, f);
        std::vector<double> s = kostin_action(cur, p);
        for (size_t j = 0; j < f.size(); ++j) {
            const double s1 = s[j] * decay - V[j] * (p.m / p.gamma) * (1.0 - decay);
            f[j] *= std::exp(cplx(0.0, (s1 - s[j]) / p.hbar));
        }
    };
    std::vector<cplx> f = psi.values;
    potential_half(f);
    kinetic_step(f, psi.grid, p, dt);
    potential_half(f);
    return ComplexField(psi.grid, std::move(f));
}

WaveDiagnostics wave_diagnostics(const ComplexField& psi, const Potential& V, const PhysParams& p) {
    const Grid1D& g = psi.grid;
    auto d = g.spectral_derivatives(psi.values, 1);
    WaveDiagnostics w;
    double x2 = 0.0, kin = 0.0;
    for (size_t j = 0; j < psi.size(); ++j) {
        const double r = std::norm(psi[j]);
        const double x = g.x(static_cast<int>(j));
        w.norm += r;
        w.x_mean += r * x;
        x2 += r * x * x;
        w.p_mean += (std::conj(psi[j]) * d[0][j]).imag();
        kin += std::norm(d[0][j]);
        w.energy += r * V.values[j];
        w.mean_force += r * V.gradient[j];
    }
    const double dx = g.dx();
    w.norm *= dx;
    w.x_mean *= dx / w.norm;
    x2 *= dx / w.norm;
    w.variance = x2 - w.x_mean * w.x_mean;
    w.p_mean *= p.hbar * dx;
    w.energy = w.energy * dx + p.hbar * p.hbar / (2.0 * p.m) * kin * dx;
    w.mean_force *= dx;
    return w;
}

double default_wave_dt(const Grid1D& g, const PhysParams& p) {
    return 1e-3 * 2.0 * M_PI * p.m * g.dx() * g.dx() / p.hbar;
}

WaveTrajectory run_wave(const ComplexField& psi0, const Potential& V, const PhysParams& p, double t_end,
                        double dt, int sample_every, Integrator integrator) {
    p.validate();
    if (!(dt > 0) || !(t_end >= 0)) throw Error(ErrorKind::invalid_argument, "need dt > 0 and t_end >= 0");
    if (sample_every < 1) throw Error(ErrorKind::invalid_argument, "sample_every must be >= 1");
    const long steps = t_end > 0 ? std::max(1L, static_cast<long>(std::ceil(t_end / dt - 1e-9))) : 0;
    const double h = steps > 0 ? t_end / steps : 0.0;
    WaveTrajectory tr;
    ComplexField psi = psi0;
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.psi.push_back(psi);
        tr.diag.push_back(wave_diagnostics(psi, V, p));
    };
    record(0.0);
    for (long s = 1; s <= steps; ++s) {
        switch (integrator) {
            case Integrator::split_step: psi = step_splitstep(psi, V.values, p, h); break;
            case Integrator::crank_nicolson: psi = step_crank_nicolson(psi, V.values, p, h); break;
            case Integrator::kostin: psi = step_kostin(psi, V.values, p, h); break;
        }
        if (s % sample_every == 0 || s == steps) record(s * h);
    }
    return tr;
}

double ehrenfest_residual(const WaveTrajectory& traj, const Potential& V, const PhysParams& p) {
    (void)V;  // <V'> is recorded per sample
    const size_t n = traj.times.size();
    if (n < 3) throw Error(ErrorKind::too_few_samples, "need at least 3 samples");
    double worst = 0.0, pmax = 0.0;
    for (const auto& d : traj.diag) pmax = std::max(pmax, std::abs(d.p_mean));
    for (size_t i = 1; i + 1 < n; ++i) {
        const double dp = (traj.diag[i + 1].p_mean - traj.diag[i - 1].p_mean) /
                          (traj.times[i + 1] - traj.times[i - 1]);
        const double r = dp + p.gamma / p.m * traj.diag[i].p_mean + traj.diag[i].mean_force;
        worst = std::max(worst, std::abs(r));
    }
    // momentum scale floored at the oscillator width sqrt(hbar m omega0) so states at rest
    // do not turn round-off into an O(1) residual
    const double scale = std::max(pmax, std::sqrt(p.hbar * p.m * p.omega0)) * (p.gamma / p.m + p.omega0);
    return scale > 0 ? worst / scale : worst;
}

std::vector<double> classical_damped_positions(double x0, double v0, double omega0, double gamma_over_m,
                                               const std::vector<double>& times) {
    auto acc = [&](double x, double v) { return -omega0 * omega0 * x - gamma_over_m * v; };
    std::vector<double> out;
    out.reserve(times.size());
    double t = 0.0, x = x0, v = v0;
    for (double target : times) {
        if (target < t) throw Error(ErrorKind::invalid_argument, "times must be increasing");
        const long n = static_cast<long>(std::ceil((target - t) / 1e-3));
        const double h = n > 0 ? (target - t) / n : 0.0;
        for (long k = 0; k < n; ++k) {
            const double k1x = v, k1v = acc(x, v);
            const double k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
            const double k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
            const double k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
            x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        }
        t = target;
        out.push_back(x);
    }
    return out;
}

double l2_distance(const RealField& a, const RealField& b) {
    require_same_grid(a.grid, b.grid, "l2 distance");
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s * a.grid.dx());
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a.grid, b.grid, "l2 distance");
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s * a.grid.dx());
}

}  // namespace qgauss
