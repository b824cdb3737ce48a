#include "qgauss/madelung.hpp"

#include <algorithm>
#include <cmath>

#include "qgauss/error.hpp"

namespace qgauss {

void PhysParams::validate(bool allow_classical) const {
    if (!(m > 0)) throw Error(ErrorKind::invalid_argument, "mass must be positive");
    if (!(gamma >= 0)) throw Error(ErrorKind::invalid_argument, "gamma must be non-negative");
    if (allow_classical ? !(hbar >= 0) : !(hbar > 0))
        throw Error(ErrorKind::invalid_argument, "hbar must be positive");
}

double density_floor(const RealField& rho) {
    double mx = 0.0;
    for (double r : rho.values) mx = std::max(mx, r);
    return kFloorFraction * mx;
}

double floored_measure(const RealField& rho) {
    const double fl = density_floor(rho);
    size_t c = 0;
    for (double r : rho.values)
        if (r < fl) ++c;
    return c * rho.grid.dx();
}

namespace {

double max_density(const std::vector<double>& rho) {
    double mx = 0.0;
    for (double r : rho) {
        if (!std::isfinite(r)) throw Error(ErrorKind::degenerate_state, "non-finite density");
        mx = std::max(mx, r);
    }
    return mx;
}

std::vector<cplx> to_complex(const std::vector<double>& f) { return {f.begin(), f.end()}; }

}  // namespace

std::vector<double> unwrapped_phase(const ComplexField& psi) {
    const size_t n = psi.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    double prev = std::arg(psi[0]);
    double acc = prev;
    out[0] = acc;
    for (size_t j = 1; j < n; ++j) {
        const double a = std::arg(psi[j]);
        double da = a - prev;
        da -= 2.0 * M_PI * std::round(da / (2.0 * M_PI));
        acc += da;
        prev = a;
        out[j] = acc;
    }
    return out;
}

HydroState to_hydro(const ComplexField& psi, const PhysParams& p) {
    p.validate();
    const Grid1D& g = psi.grid;
    const int n = g.n();
    RealField rho(g);
    for (int j = 0; j < n; ++j) rho[j] = std::norm(psi[j]);
    const double mx = max_density(rho.values);
    if (mx <= 0) throw Error(ErrorKind::degenerate_state, "wave function vanishes everywhere");
    const double norm = integrate(rho);
    if (std::abs(norm - 1.0) > 1e-8)
        throw Error(ErrorKind::invalid_argument, "wave function is not normalized");

    const double fl = kFloorFraction * mx;
    // real and imaginary parts differentiated separately so a real psi gives v = 0 exactly
    std::vector<cplx> re(n), im(n);
    for (int j = 0; j < n; ++j) {
        re[j] = psi[j].real();
        im[j] = psi[j].imag();
    }
    const auto dre = g.spectral_derivatives(re, 1)[0];
    const auto dim = g.spectral_derivatives(im, 1)[0];
    RealField v(g);
    for (int j = 0; j < n; ++j)
        if (rho[j] > fl)
            v[j] = (p.hbar / p.m) * (psi[j].real() * dim[j].real() - psi[j].imag() * dre[j].real()) / rho[j];

    RealField s(g, unwrapped_phase(psi));
    for (auto& x : s.values) x *= p.hbar;
    return HydroState{std::move(rho), std::move(v), std::move(s)};
}

ComplexField from_hydro(const HydroState& state, const PhysParams& p) {
    p.validate();
    if (!state.s) throw Error(ErrorKind::missing_phase, "hydro state carries no phase field");
    require_same_grid(state.rho.grid, state.s->grid, "rho vs s");
    ComplexField psi(state.rho.grid);
    for (size_t j = 0; j < psi.size(); ++j)
        psi[j] = std::polar(std::sqrt(std::max(state.rho[j], 0.0)), (*state.s)[j] / p.hbar);
    return psi;
}

RealField quantum_potential(const RealField& rho, const PhysParams& p) {
    const double fl = density_floor(rho);
    const double rfl = std::sqrt(fl);
    std::vector<double> amp(rho.size());
    for (size_t j = 0; j < rho.size(); ++j) amp[j] = std::sqrt(std::max(rho[j], 0.0));
    auto d = rho.grid.spectral_derivatives(to_complex(amp), 2);
    const double c = p.hbar * p.hbar / (2.0 * p.m);
    RealField q(rho.grid);
    for (size_t j = 0; j < rho.size(); ++j) q[j] = -c * d[1][j].real() / std::max(amp[j], rfl);
    return q;
}

RealField quantum_force(const RealField& rho, const PhysParams& p) {
    // Quotient rule on spectral derivatives of sqrt(rho): differentiating the clamped Q
    // spectrally would ring wherever the clamp switches on.
    const double fl = density_floor(rho);
    const double rfl = std::sqrt(fl);
    std::vector<double> amp(rho.size());
    for (size_t j = 0; j < rho.size(); ++j) amp[j] = std::sqrt(std::max(rho[j], 0.0));
    auto d = rho.grid.spectral_derivatives(to_complex(amp), 3);
    const double c = p.hbar * p.hbar / (2.0 * p.m);
    RealField f(rho.grid);
    for (size_t j = 0; j < rho.size(); ++j) {
        const double r = std::max(amp[j], rfl);
        const double r1 = d[0][j].real(), r2 = d[1][j].real(), r3 = d[2][j].real();
        f[j] = -c * (r3 / r - r2 * r1 / (r * r));
    }
    return f;
}

RealField quantum_euler_rhs(const HydroState& state, const RealField& dV, const PhysParams& p) {
    require_same_grid(state.rho.grid, dV.grid, "rho vs dV");
    RealField ke(state.v.grid);
    for (size_t j = 0; j < ke.size(); ++j) ke[j] = 0.5 * state.v[j] * state.v[j];
    RealField dke = derivative(ke, 1);
    RealField dq = quantum_force(state.rho, p);
    RealField out(state.rho.grid);
    for (size_t j = 0; j < out.size(); ++j) out[j] = -dke[j] - (dV[j] + dq[j]) / p.m;
    return out;
}

double log_identity_residual(const RealField& rho) {
    const size_t n = rho.size();
    const double mx = max_density(rho.values);
    if (mx <= 0) throw Error(ErrorKind::degenerate_state, "density vanishes everywhere");
    std::vector<double> amp(n);
    for (size_t j = 0; j < n; ++j) amp[j] = std::sqrt(std::max(rho[j], 0.0));
    auto da = rho.grid.spectral_derivatives(to_complex(amp), 2);
    auto dr = rho.grid.spectral_derivatives(to_complex(rho.values), 2);
    double worst = 0.0;
    for (size_t j = 0; j < n; ++j) {
        if (rho[j] <= 1e-6 * mx) continue;
        const double lhs = da[1][j].real() / amp[j];
        const double l1 = dr[0][j].real() / rho[j];
        const double l2 = dr[1][j].real() / rho[j] - l1 * l1;
        const double rhs = 0.5 * l2 + 0.25 * l1 * l1;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double phi_residual(const ComplexField& psi, const ComplexField& dpsi_dt, const RealField& V,
                    const PhysParams& p) {
    p.validate();
    require_same_grid(psi.grid, dpsi_dt.grid, "psi vs dpsi_dt");
    require_same_grid(psi.grid, V.grid, "psi vs V");
    const size_t n = psi.size();
    std::vector<double> rho(n);
    for (size_t j = 0; j < n; ++j) rho[j] = std::norm(psi[j]);
    const double mx = max_density(rho);
    if (mx <= 0) throw Error(ErrorKind::degenerate_state, "wave function vanishes everywhere");
    auto d = psi.grid.spectral_derivatives(psi.values, 2);
    const cplx I(0.0, 1.0);
    const double c = p.hbar * p.hbar / (2.0 * p.m);
    double worst = 0.0;
    for (size_t j = 0; j < n; ++j) {
        if (rho[j] <= 1e-6 * mx) continue;
        const cplx f1 = d[0][j] / psi[j];
        const cplx f2 = d[1][j] / psi[j] - f1 * f1;
        const cplx ft = dpsi_dt[j] / psi[j];
        const cplx r = I * p.hbar * ft + c * (f2 + f1 * f1) - V[j];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace qgauss
