#pragma once

#include "qgauss/grid.hpp"
#include "qgauss/madelung.hpp"

namespace qgauss {

// Normalized Gaussian with density variance sigma^2, centre x0 and mean wavenumber k0.
ComplexField gaussian_packet(const Grid1D& g, double x0, double sigma, double k0 = 0.0);

// Ground state of V = m w^2 x^2 / 2.
ComplexField harmonic_ground_state(const Grid1D& g, const PhysParams& p);

// Displaced ground state with mean position x0 and mean momentum p0.
ComplexField coherent_state(const Grid1D& g, const PhysParams& p, double x0, double p0 = 0.0);

// Normalized superposition of two real Gaussians (node-free for equal signs).
ComplexField two_bump_state(const Grid1D& g, double xa, double xb, double sigma, double weight_b = 1.0);

// Rescale so that integrate(|psi|^2) == 1.
void normalize(ComplexField& psi);

// Exact free-packet density variance sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2).
double free_variance(double sigma0, double t, const PhysParams& p);

}  // namespace qgauss
