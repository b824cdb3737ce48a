#pragma once

#include <vector>

#include "qgauss/constraint.hpp"
#include "qgauss/grid.hpp"
#include "qgauss/madelung.hpp"

namespace qgauss {

struct WaveDiagnostics {
    double norm = 0.0;
    double x_mean = 0.0;
    double p_mean = 0.0;      // hbar * int Im(conj(psi) psi')
    double energy = 0.0;      // <H> of the linear Hamiltonian
    double mean_force = 0.0;  // <V'>
    double variance = 0.0;
};

struct WaveTrajectory {
    std::vector<double> times;
    std::vector<ComplexField> psi;
    std::vector<WaveDiagnostics> diag;
};

enum class Integrator { split_step, crank_nicolson, kostin };

// d psi/dt = -(i/hbar)(-(hbar^2/2m) psi'' + V psi), spectral Laplacian.
ComplexField schrodinger_rhs(const ComplexField& psi, const RealField& V, const PhysParams& p);

// Strang splitting: half potential, full kinetic in wavenumber space, half potential.
ComplexField step_splitstep(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt);

// Crank-Nicolson with an eighth-order periodic finite-difference Laplacian (cyclic banded solve).
ComplexField step_crank_nicolson(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt);

// Split step with the friction potential gamma (S - <S>)/m added to V; uses p.gamma.
ComplexField step_kostin(const ComplexField& psi, const RealField& V, const PhysParams& p, double dt);

// Action field used by the friction potential: unwrapped phase times hbar, held constant
// outside the supported region and shifted to zero density-weighted mean.
std::vector<double> kostin_action(const ComplexField& psi, const PhysParams& p);

WaveDiagnostics wave_diagnostics(const ComplexField& psi, const Potential& V, const PhysParams& p);

// Integrates to t_end with N = ceil(t_end/dt) equal steps; samples every `sample_every`
// steps plus the final state.
WaveTrajectory run_wave(const ComplexField& psi0, const Potential& V, const PhysParams& p, double t_end,
                        double dt, int sample_every, Integrator integrator);

// max over interior samples |d<P>/dt + (gamma/m)<P> + <V'>| / (P0 (gamma/m + omega0)) with
// P0 = max(max|<P>|, sqrt(hbar m omega0)), centred differences in time.
double ehrenfest_residual(const WaveTrajectory& traj, const Potential& V, const PhysParams& p);

// Default oracle step 1e-3 * 2 pi m dx^2 / hbar.
double default_wave_dt(const Grid1D& g, const PhysParams& p);

// Positions of x'' = -omega0^2 x - (gamma/m) x' at the requested (increasing) times, RK4 with
// steps of at most 1e-3.
std::vector<double> classical_damped_positions(double x0, double v0, double omega0, double gamma_over_m,
                                               const std::vector<double>& times);

double l2_distance(const RealField& a, const RealField& b);
double l2_distance(const ComplexField& a, const ComplexField& b);

}  // namespace qgauss
