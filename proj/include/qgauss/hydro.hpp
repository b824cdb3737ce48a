#pragma once

#include <vector>

#include "qgauss/constraint.hpp"
#include "qgauss/grid.hpp"
#include "qgauss/madelung.hpp"
#include "qgauss/stencil.hpp"

namespace qgauss {

struct HydroRates {
    RealField drho_dt;
    AccelerationField dv_dt;
};

// drho/dt = -(rho v)', dv/dt = minimize_Z(state), both spectral.
HydroRates hydro_rhs(const HydroState& state, const ForceModel& f, const PhysParams& p);

inline constexpr double kDefaultStabilityC = 0.1;
// dt <= C m dx^2 / hbar
double stability_bound(const Grid1D& g, const PhysParams& p, double C = kDefaultStabilityC);

struct StepLog {
    bool renormalized = false;
    double norm_correction = 0.0;  // norm - 1 before rescaling
};

struct HydroDiagnostics {
    double norm = 0.0;
    double x_mean = 0.0;
    double p_mean = 0.0;  // m int rho v
    double variance = 0.0;
    double energy = 0.0;
    double kinetic = 0.0;           // int rho v^2 / 2 (per unit mass)
    double irrotationality = 0.0;   // sup over the support of |v - s'/m|
    double floored_measure = 0.0;
};

struct HydroTrajectory {
    std::vector<double> times;
    std::vector<HydroState> states;
    std::vector<HydroDiagnostics> diag;
    struct Correction {
        double t;
        double norm_error;
    };
    std::vector<Correction> corrections;
};

// E = int rho (m v^2/2 + V) + (hbar^2/2m) int ((sqrt rho)')^2; the last term is dropped
// when the quantum force is switched off.
double hydro_energy(const HydroState& state, const ForceModel& f, const PhysParams& p);

HydroDiagnostics hydro_diagnostics(const HydroState& state, const ForceModel& f, const PhysParams& p);

// Advances (rho, v, s) with classical RK4. See HydroIntegrator for the discretization.
HydroState step_hydro(const HydroState& state, const ForceModel& f, const PhysParams& p, double dt,
                      StepLog* log = nullptr);

HydroTrajectory run_hydro(const HydroState& initial, const ForceModel& f, const PhysParams& p, double t_end,
                          double dt, int sample_every);

// Integrator state kept between steps. The fluid is carried as l = ln sqrt(rho), v and s.
// Continuity and the Hamilton-Jacobi equation are evaluated through the amplitude
// exp(l + i s/hbar) with spectral derivatives; v follows the Euler equation with the
// least-constraint acceleration, using 6th-order finite differences of l and v. Outside the
// support (rho < floor) the fields are slaved to low-order polynomial extrapolations of the
// outermost supported samples, so the exponentially small tail never feeds back.
class HydroIntegrator {
public:
    HydroIntegrator(const HydroState& initial, const ForceModel& f, const PhysParams& p,
                    double stability_c = kDefaultStabilityC);

    void step(double dt, StepLog* log = nullptr);
    HydroState state() const;
    double time() const { return t_; }

    int fit_points = 8;

private:
    struct Fields {
        std::vector<double> l, v, s;
    };
    void rates(const Fields& y, const std::vector<char>& mask, Fields& k) const;
    void extrapolate(Fields& y, int lo, int hi) const;
    void support(const Fields& y, int& lo, int& hi) const;
    void check(const Fields& y, int lo, int hi) const;

    Grid1D grid_;
    ForceModel force_;
    PhysParams p_;
    double c_;
    Fields y_;
    double t_ = 0.0;
    FiniteDifference fd_;
};

}  // namespace qgauss
