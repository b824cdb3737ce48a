#pragma once

#include <cstdint>
#include <vector>

#include "qgauss/grid.hpp"
#include "qgauss/madelung.hpp"

namespace qgauss {

using AccelerationField = RealField;

// External potential with its gradient. Potentials are generally not periodic,
// so the gradient is supplied analytically or by finite differences, never spectrally.
struct Potential {
    RealField values;
    RealField gradient;
};

Potential zero_potential(const Grid1D& g);
Potential harmonic_potential(const Grid1D& g, double m, double omega0, double center = 0.0);
// V(x) = sum_k c[k] x^k
Potential polynomial_potential(const Grid1D& g, const std::vector<double>& coeffs);
// Gradient by 6th-order finite differences.
Potential sampled_potential(const RealField& V);

struct ForceModel {
    Potential V;
    double gamma = 0.0;
    bool include_quantum = true;
};

ForceModel make_force(const Potential& V, const PhysParams& p, bool include_quantum = true);

// The pointwise minimizer: D v/Dt + (V' + gamma v + Q')/m = 0 solved for dv/dt.
inline double least_constraint_acceleration(double v, double dv, double dV, double dQ, double gamma,
                                            double m) {
    return -v * dv - (dV + gamma * v + dQ) / m;
}

RealField material_derivative(const HydroState& state, const AccelerationField& a);

// r(a) = a + v v' + (V' + gamma v + Q')/m; evaluate_Z integrates rho r^2.
RealField constraint_residual(const AccelerationField& a, const HydroState& state, const ForceModel& f,
                              const PhysParams& p);
double evaluate_Z(const AccelerationField& a, const HydroState& state, const ForceModel& f,
                  const PhysParams& p);
// dZ/da_j = 2 rho_j r_j dx
RealField Z_gradient(const AccelerationField& a, const HydroState& state, const ForceModel& f,
                     const PhysParams& p);

AccelerationField minimize_Z(const HydroState& state, const ForceModel& f, const PhysParams& p);

struct MinimumReport {
    bool pass = false;
    int trials = 0;
    int nonnegative = 0;
    double worst_margin = 0.0;           // smallest Z(a*+eps d) - Z(a*)
    double worst_quadratic_error = 0.0;  // relative deviation from eps^2 * int rho d^2
    double z_at_minimum = 0.0;
};

// Random perturbation built from the lowest n/4 Fourier modes, scaled to sup |d| = 1.
RealField band_limited_perturbation(const Grid1D& g, std::uint64_t& rng_state);

struct MinimumTrial {
    double margin = 0.0;
    double expected = 0.0;  // eps^2 * int rho d^2
    double quadratic_error = 0.0;
};

MinimumReport verify_minimum(const HydroState& state, const ForceModel& f, const PhysParams& p,
                             int trials, double epsilon, std::uint64_t seed = 42,
                             std::vector<MinimumTrial>* detail = nullptr);

// Surface-adapted kinematics at quadrature samples of a constraint surface. Vector fields are
// given by their components in the orthonormal frame (e_theta, e_phi, n).
struct TangentState {
    std::vector<double> weight;  // area element per sample
    std::vector<double> rho;
    std::vector<double> v_theta, v_phi, v_normal;
    std::vector<double> conv_theta, conv_phi, conv_normal;    // (v . grad) v
    std::vector<double> gradq_theta, gradq_phi, gradq_normal;  // grad Q_t
    std::vector<double> gradv_theta, gradv_phi, gradv_normal;  // grad V_ext
    size_t size() const { return rho.size(); }
};

struct SurfaceForce {
    double gamma = 0.0;
    bool include_quantum = true;
};

struct TangentMinimum {
    std::vector<double> a_theta, a_phi;
    double residual = 0.0;  // int rho (normal part of the reference acceleration)^2 dS
};

TangentMinimum minimize_Z_tangent(const TangentState& state, const SurfaceForce& f, const PhysParams& p);
double evaluate_Z_tangent(const std::vector<double>& a_theta, const std::vector<double>& a_phi,
                          const TangentState& state, const SurfaceForce& f, const PhysParams& p);

}  // namespace qgauss
