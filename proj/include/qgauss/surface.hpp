#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qgauss/constraint.hpp"
#include "qgauss/grid.hpp"
#include "qgauss/madelung.hpp"

namespace qgauss {

// Band-limited wave function on a sphere of radius R, psi = sum c_lm Y_lm(theta, phi) with
// orthonormal complex harmonics (Condon-Shortley phase). Normalization: sum |c|^2 R^2 = 1.
struct SphereState {
    int lmax = 0;
    double R = 1.0;
    std::vector<cplx> c;  // index l*l + l + m

    static int index(int l, int m) { return l * l + l + m; }
    cplx& at(int l, int m) { return c[index(l, m)]; }
    cplx at(int l, int m) const { return c[index(l, m)]; }
};

SphereState make_sphere_state(int lmax, double R);
// Single normalized harmonic Y_l^m.
SphereState spherical_harmonic_state(int lmax, double R, int l, int m);
double sphere_norm(const SphereState& s);
void normalize(SphereState& s);

// Gauss-Legendre latitudes (in cos theta) times equispaced longitudes.
struct SphereGrid {
    int lmax = 0;
    int nlat = 0, nlon = 0;
    std::vector<double> theta, weight;  // weight in cos theta, sums to 2
    std::vector<double> phi;
    // normalized associated Legendre functions and their theta derivatives, m >= 0,
    // per latitude in GSL array order
    std::vector<std::vector<double>> P, dP;
    size_t size() const { return static_cast<size_t>(nlat) * nlon; }
};

// nlat >= lmax + 1 and nlon >= 2 lmax + 1 make analysis exact for degree <= lmax.
SphereGrid make_sphere_grid(int lmax, int nlat = 0, int nlon = 0);

// Values at grid points, latitude-major.
std::vector<cplx> synthesize(const SphereState& s, const SphereGrid& g);
SphereState analyze(const std::vector<cplx>& values, const SphereGrid& g, int lmax, double R);

SphereState laplace_beltrami(const SphereState& s);
double sphere_energy(int l, double R, const PhysParams& p);  // hbar^2 l(l+1)/(2 m R^2)
SphereState step_sphere_schrodinger(const SphereState& s, double dt, const PhysParams& p);
cplx sphere_overlap(const SphereState& a, const SphereState& b);  // <a|b>

struct SphereHydro {
    std::vector<double> theta, phi;
    std::vector<double> rho, q;
    TangentState tangent;
};

// Tangential fluid fields and the jets needed by the tangent-constrained minimizer, computed
// exactly from the spectral representation. Samples below the density floor get zero
// velocity and zero quantum force.
SphereHydro sphere_to_hydro(const SphereState& s, const SphereGrid& g, const PhysParams& p);

using Vec3 = std::array<double, 3>;
using SurfaceMap = std::function<Vec3(double, double)>;

// Embedded surface r(u, v). Derivative callbacks are optional; missing ones fall back to
// central differences with step 1e-5 * scale.
struct ParametricSurface {
    std::string name;
    SurfaceMap r;
    SurfaceMap r_u, r_v, r_uu, r_uv, r_vv;
    double u_min = 0, u_max = 1, v_min = 0, v_max = 1;
    double scale = 1.0;
};

ParametricSurface sphere_surface(double R);                 // (theta, phi)
ParametricSurface cylinder_surface(double R, double half_height = 1.0);  // (phi, z)
ParametricSurface torus_surface(double R_major, double r_minor);         // (phi, theta)
ParametricSurface plane_surface();

struct Curvatures {
    double M = 0;  // mean curvature, positive where the surface bends away from r_u x r_v
    double K = 0;  // Gaussian curvature
    double M2_minus_K = 0;  // ((k1 - k2)/2)^2 evaluated without cancellation
};

Curvatures curvatures(const ParametricSurface& surf, double u, double v);
// -(hbar^2/2m)(M^2 - K), never positive.
double geometric_potential(const ParametricSurface& surf, double u, double v, const PhysParams& p);

// Largest relative mismatch between the supplied derivative callbacks and central differences.
double derivative_mismatch(const ParametricSurface& surf, double u, double v);

}  // namespace qgauss
