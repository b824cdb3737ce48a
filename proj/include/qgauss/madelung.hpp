#pragma once

#include <optional>

#include "qgauss/grid.hpp"

namespace qgauss {

struct PhysParams {
    double hbar = 1.0;
    double m = 1.0;
    double gamma = 0.0;   // friction coefficient, mass/time
    double omega0 = 1.0;  // harmonic scenarios only

    // hbar == 0 is accepted only when allow_classical is set.
    void validate(bool allow_classical = false) const;
};

struct HydroState {
    RealField rho;
    RealField v;
    std::optional<RealField> s;  // action, present when extracted from psi or evolved
};

// Densities below 1e-12 * max(rho) are treated as empty.
inline constexpr double kFloorFraction = 1e-12;
double density_floor(const RealField& rho);
// Total length of the region where rho sits below the floor.
double floored_measure(const RealField& rho);

// arg psi unwrapped from j = 0 so consecutive samples differ by less than pi.
std::vector<double> unwrapped_phase(const ComplexField& psi);

HydroState to_hydro(const ComplexField& psi, const PhysParams& p);
ComplexField from_hydro(const HydroState& state, const PhysParams& p);

// Q = -(hbar^2/2m) (sqrt rho)'' / sqrt rho, with sqrt rho clamped at sqrt(floor).
RealField quantum_potential(const RealField& rho, const PhysParams& p);
// Gradient of Q (not divided by m, not negated).
RealField quantum_force(const RealField& rho, const PhysParams& p);

// Right-hand side of the conservative Euler equation written as the gradient of the
// Bernoulli function: -(v^2/2 + (V + Q)/m)'. V enters through its gradient dV.
RealField quantum_euler_rhs(const HydroState& state, const RealField& dV, const PhysParams& p);

// sup |(sqrt rho)''/sqrt rho - (1/2)(ln rho)'' - (1/4)((ln rho)')^2| over rho > 1e-6 max rho.
double log_identity_residual(const RealField& rho);

// sup |i hbar Phi_t + (hbar^2/2m)(Phi'' + Phi'^2) - V| with Phi = ln psi, over rho > 1e-6 max rho.
double phi_residual(const ComplexField& psi, const ComplexField& dpsi_dt, const RealField& V,
                    const PhysParams& p);

}  // namespace qgauss
