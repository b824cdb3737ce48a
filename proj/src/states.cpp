#include "qgauss/states.hpp"

#include <cmath>

#include "qgauss/error.hpp"

namespace qgauss {

void normalize(ComplexField& psi) {
    double s = 0.0;
    for (const auto& z : psi.values) s += std::norm(z);
    s *= psi.grid.dx();
    if (!(s > 0) || !std::isfinite(s)) throw Error(ErrorKind::degenerate_state, "cannot normalize");
    const double f = 1.0 / std::sqrt(s);
    for (auto& z : psi.values) z *= f;
}

ComplexField gaussian_packet(const Grid1D& g, double x0, double sigma, double k0) {
    if (!(sigma > 0)) throw Error(ErrorKind::invalid_argument, "sigma must be positive");
    const double a = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
    auto psi = sample_complex(g, [&](double x) {
        const double d = x - x0;
        return a * std::exp(cplx(-d * d / (4.0 * sigma * sigma), k0 * x));
    });
    normalize(psi);
    return psi;
}

ComplexField harmonic_ground_state(const Grid1D& g, const PhysParams& p) {
    return gaussian_packet(g, 0.0, std::sqrt(p.hbar / (2.0 * p.m * p.omega0)), 0.0);
}

ComplexField coherent_state(const Grid1D& g, const PhysParams& p, double x0, double p0) {
    return gaussian_packet(g, x0, std::sqrt(p.hbar / (2.0 * p.m * p.omega0)), p0 / p.hbar);
}

ComplexField two_bump_state(const Grid1D& g, double xa, double xb, double sigma, double weight_b) {
    auto psi = sample_complex(g, [&](double x) {
        const double da = (x - xa) / sigma, db = (x - xb) / sigma;
        return cplx(std::exp(-0.25 * da * da) + weight_b * std::exp(-0.25 * db * db), 0.0);
    });
    normalize(psi);
    return psi;
}

double free_variance(double sigma0, double t, const PhysParams& p) {
    const double r = p.hbar * t / (2.0 * p.m * sigma0 * sigma0);
    return sigma0 * sigma0 * (1.0 + r * r);
}

}  // namespace qgauss
