#include "qgauss/surface.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_legendre.h>

#include <algorithm>
#include <cmath>

#include "qgauss/error.hpp"

namespace qgauss {

SphereState make_sphere_state(int lmax, double R) {
    if (lmax < 0) throw Error(ErrorKind::invalid_argument, "lmax must be non-negative");
    if (!(R > 0)) throw Error(ErrorKind::invalid_argument, "sphere radius must be positive");
    SphereState s;
    s.lmax = lmax;
    s.R = R;
    s.c.assign(static_cast<size_t>((lmax + 1) * (lmax + 1)), 0.0);
    return s;
}

SphereState spherical_harmonic_state(int lmax, double R, int l, int m) {
    if (l < 0 || l > lmax || std::abs(m) > l) throw Error(ErrorKind::invalid_argument, "invalid (l, m)");
    SphereState s = make_sphere_state(lmax, R);
    s.at(l, m) = 1.0 / R;
    return s;
}

double sphere_norm(const SphereState& s) {
    double t = 0.0;
    for (const auto& z : s.c) t += std::norm(z);
    return t * s.R * s.R;
}

void normalize(SphereState& s) {
    const double n = sphere_norm(s);
    if (!(n > 0)) throw Error(ErrorKind::degenerate_state, "sphere state vanishes");
    const double f = 1.0 / std::sqrt(n);
    for (auto& z : s.c) z *= f;
}

SphereGrid make_sphere_grid(int lmax, int nlat, int nlon) {
    if (lmax < 0) throw Error(ErrorKind::invalid_argument, "lmax must be non-negative");
    SphereGrid g;
    g.lmax = lmax;
    g.nlat = nlat > 0 ? nlat : lmax + 1;
    g.nlon = nlon > 0 ? nlon : 2 * lmax + 2;
    if (g.nlat < 1 || g.nlon < 1) throw Error(ErrorKind::invalid_argument, "empty sphere grid");

    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(g.nlat);
    const size_t nP = gsl_sf_legendre_array_n(lmax);
    for (int i = 0; i < g.nlat; ++i) {
        double x, w;
        gsl_integration_glfixed_point(-1.0, 1.0, i, &x, &w, t);
        g.theta.push_back(std::acos(x));
        g.weight.push_back(w);
        std::vector<double> P(nP), dP(nP);
        gsl_sf_legendre_deriv_alt_array_e(GSL_SF_LEGENDRE_SPHARM, lmax, x, -1.0, P.data(), dP.data());
        g.P.push_back(std::move(P));
        g.dP.push_back(std::move(dP));
    }
    gsl_integration_glfixed_table_free(t);
    for (int j = 0; j < g.nlon; ++j) g.phi.push_back(2.0 * M_PI * j / g.nlon);
    return g;
}

namespace {

const cplx I(0.0, 1.0);

double theta_part(const SphereGrid& g, int i, int l, int m, int dth) {
    const int am = std::abs(m);
    const size_t k = gsl_sf_legendre_array_index(l, am);
    double v;
    if (dth == 0) {
        v = g.P[i][k];
    } else if (dth == 1) {
        v = g.dP[i][k];
    } else {
        // Legendre equation: P'' = -cot P' - (l(l+1) - m^2/sin^2) P
        const double th = g.theta[i], s = std::sin(th);
        v = -std::cos(th) / s * g.dP[i][k] - (l * (l + 1.0) - double(m) * m / (s * s)) * g.P[i][k];
    }
    if (m < 0 && (am % 2)) v = -v;
    return v;
}

// Samples of sum_lm f(l) c_lm d^dth/dtheta d^dph/dphi Y_lm.
std::vector<cplx> synth(const SphereState& s, const SphereGrid& g, int dth, int dph,
                        const std::function<double(int)>& f) {
    if (s.lmax > g.lmax) throw Error(ErrorKind::grid_mismatch, "sphere grid band limit below state's");
    std::vector<cplx> out(g.size(), 0.0);
    const int L = s.lmax;
    std::vector<cplx> Fm(2 * L + 1);
    for (int i = 0; i < g.nlat; ++i) {
        for (int m = -L; m <= L; ++m) {
            cplx acc = 0.0;
            for (int l = std::abs(m); l <= L; ++l) {
                const cplx c = s.at(l, m);
                if (c == 0.0) continue;
                acc += f(l) * c * theta_part(g, i, l, m, dth);
            }
            for (int d = 0; d < dph; ++d) acc *= I * double(m);
            Fm[m + L] = acc;
        }
        for (int j = 0; j < g.nlon; ++j) {
            cplx v = 0.0;
            for (int m = -L; m <= L; ++m) v += Fm[m + L] * std::exp(I * (m * g.phi[j]));
            out[static_cast<size_t>(i) * g.nlon + j] = v;
        }
    }
    return out;
}

}  // namespace

std::vector<cplx> synthesize(const SphereState& s, const SphereGrid& g) {
    return synth(s, g, 0, 0, [](int) { return 1.0; });
}

SphereState analyze(const std::vector<cplx>& values, const SphereGrid& g, int lmax, double R) {
    if (values.size() != g.size()) throw Error(ErrorKind::grid_mismatch, "sample count does not match sphere grid");
    if (lmax > g.lmax) throw Error(ErrorKind::grid_mismatch, "sphere grid band limit too low");
    SphereState s = make_sphere_state(lmax, R);
    const double dphi = 2.0 * M_PI / g.nlon;
    for (int m = -lmax; m <= lmax; ++m) {
        for (int i = 0; i < g.nlat; ++i) {
            cplx G = 0.0;
            for (int j = 0; j < g.nlon; ++j)
                G += values[static_cast<size_t>(i) * g.nlon + j] * std::exp(-I * (m * g.phi[j]));
            G *= dphi * g.weight[i];
            for (int l = std::abs(m); l <= lmax; ++l) s.at(l, m) += G * theta_part(g, i, l, m, 0);
        }
    }
    return s;
}

SphereState laplace_beltrami(const SphereState& s) {
    SphereState out = s;
    for (int l = 0; l <= s.lmax; ++l)
        for (int m = -l; m <= l; ++m) out.at(l, m) *= -l * (l + 1.0) / (s.R * s.R);
    return out;
}

double sphere_energy(int l, double R, const PhysParams& p) {
    return p.hbar * p.hbar * l * (l + 1.0) / (2.0 * p.m * R * R);
}

SphereState step_sphere_schrodinger(const SphereState& s, double dt, const PhysParams& p) {
    p.validate();
    SphereState out = s;
    for (int l = 0; l <= s.lmax; ++l) {
        const cplx ph = std::exp(cplx(0.0, -sphere_energy(l, s.R, p) * dt / p.hbar));
        for (int m = -l; m <= l; ++m) out.at(l, m) *= ph;
    }
    return out;
}

cplx sphere_overlap(const SphereState& a, const SphereState& b) {
    if (a.lmax != b.lmax) throw Error(ErrorKind::grid_mismatch, "band limits differ");
    cplx s = 0.0;
    for (size_t k = 0; k < a.c.size(); ++k) s += std::conj(a.c[k]) * b.c[k];
    return s * a.R * a.R;
}

SphereHydro sphere_to_hydro(const SphereState& s, const SphereGrid& g, const PhysParams& p) {
    p.validate();
    auto one = [](int) { return 1.0; };
    const double R = s.R;
    auto lap = [R](int l) { return -l * (l + 1.0) / (R * R); };
    const auto psi = synth(s, g, 0, 0, one);
    const auto pt = synth(s, g, 1, 0, one);
    const auto pp = synth(s, g, 0, 1, one);
    const auto ptt = synth(s, g, 2, 0, one);
    const auto ptp = synth(s, g, 1, 1, one);
    const auto ppp = synth(s, g, 0, 2, one);
    const auto L0 = synth(s, g, 0, 0, lap);
    const auto Lt = synth(s, g, 1, 0, lap);
    const auto Lp = synth(s, g, 0, 1, lap);

    const size_t N = g.size();
    SphereHydro h;
    h.theta.resize(N);
    h.phi.resize(N);
    h.rho.resize(N);
    h.q.assign(N, 0.0);
    TangentState& ts = h.tangent;
    for (auto* v : {&ts.weight, &ts.rho, &ts.v_theta, &ts.v_phi, &ts.v_normal, &ts.conv_theta, &ts.conv_phi,
                    &ts.conv_normal, &ts.gradq_theta, &ts.gradq_phi, &ts.gradq_normal, &ts.gradv_theta,
                    &ts.gradv_phi, &ts.gradv_normal})
        v->assign(N, 0.0);

    double rmax = 0.0;
    for (size_t k = 0; k < N; ++k) rmax = std::max(rmax, std::norm(psi[k]));
    if (!(rmax > 0) || !std::isfinite(rmax)) throw Error(ErrorKind::degenerate_state, "sphere state vanishes");
    const double fl = kFloorFraction * rmax;
    const double hm = p.hbar / p.m;
    const double c = p.hbar * p.hbar / (2.0 * p.m);
    const double dphi = 2.0 * M_PI / g.nlon;

    for (int i = 0; i < g.nlat; ++i) {
        const double th = g.theta[i], st = std::sin(th), ct = std::cos(th), cot = ct / st;
        for (int j = 0; j < g.nlon; ++j) {
            const size_t k = static_cast<size_t>(i) * g.nlon + j;
            h.theta[k] = th;
            h.phi[k] = g.phi[j];
            const double r = std::norm(psi[k]);
            h.rho[k] = r;
            ts.rho[k] = r;
            ts.weight[k] = R * R * g.weight[i] * dphi;
            if (r <= fl) continue;
            const cplx ut = pt[k] / psi[k], up = pp[k] / psi[k];
            const cplx utt = ptt[k] / psi[k] - ut * ut;
            const cplx utp = ptp[k] / psi[k] - ut * up;
            const cplx upp = ppp[k] / psi[k] - up * up;
            const double vt = hm / R * ut.imag();
            const double vp = hm / (R * st) * up.imag();
            const double vt_t = hm / R * utt.imag();
            const double vt_p = hm / R * utp.imag();
            const double vp_t = hm / R * (-ct / (st * st) * up.imag() + utp.imag() / st);
            const double vp_p = hm / (R * st) * upp.imag();
            ts.v_theta[k] = vt;
            ts.v_phi[k] = vp;
            ts.conv_theta[k] = vt * vt_t / R + vp * vt_p / (R * st) - vp * vp * cot / R;
            ts.conv_phi[k] = vt * vp_t / R + vp * vp_p / (R * st) + vt * vp * cot / R;
            ts.conv_normal[k] = -(vt * vt + vp * vp) / R;

            // Q = -(hbar^2/2m) [Re(lap psi / psi) + |v|^2 / hm^2]
            const double v2 = vt * vt + vp * vp;
            const cplx lr = L0[k] / psi[k];
            h.q[k] = -c * (lr.real() + v2 / (hm * hm));
            const double dq_t = -c * ((Lt[k] / psi[k] - lr * ut).real() + 2.0 * (vt * vt_t + vp * vp_t) / (hm * hm));
            const double dq_p = -c * ((Lp[k] / psi[k] - lr * up).real() + 2.0 * (vt * vt_p + vp * vp_p) / (hm * hm));
            ts.gradq_theta[k] = dq_t / R;
            ts.gradq_phi[k] = dq_p / (R * st);
        }
    }
    return h;
}

// ---- parametric surfaces ----

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 mul(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Jet {
    Vec3 ru, rv, ruu, ruv, rvv;
};

Jet fd_jet(const ParametricSurface& s, double u, double v) {
    const double h = 1e-5 * s.scale;
    auto du = [&](const SurfaceMap& f, double a, double b) { return mul(0.5 / h, sub(f(a + h, b), f(a - h, b))); };
    auto dv = [&](const SurfaceMap& f, double a, double b) { return mul(0.5 / h, sub(f(a, b + h), f(a, b - h))); };
    Jet j;
    j.ru = du(s.r, u, v);
    j.rv = dv(s.r, u, v);
    SurfaceMap ru = s.r_u ? s.r_u : SurfaceMap([&](double a, double b) { return du(s.r, a, b); });
    SurfaceMap rv = s.r_v ? s.r_v : SurfaceMap([&](double a, double b) { return dv(s.r, a, b); });
    j.ruu = du(ru, u, v);
    j.ruv = mul(0.5, add(dv(ru, u, v), du(rv, u, v)));
    j.rvv = dv(rv, u, v);
    return j;
}

Jet jet(const ParametricSurface& s, double u, double v) {
    Jet fd;
    bool need_fd = !(s.r_u && s.r_v && s.r_uu && s.r_uv && s.r_vv);
    if (need_fd) fd = fd_jet(s, u, v);
    Jet j;
    j.ru = s.r_u ? s.r_u(u, v) : fd.ru;
    j.rv = s.r_v ? s.r_v(u, v) : fd.rv;
    j.ruu = s.r_uu ? s.r_uu(u, v) : fd.ruu;
    j.ruv = s.r_uv ? s.r_uv(u, v) : fd.ruv;
    j.rvv = s.r_vv ? s.r_vv(u, v) : fd.rvv;
    return j;
}

}  // namespace

ParametricSurface sphere_surface(double R) {
    ParametricSurface s;
    s.name = "sphere";
    s.scale = 1.0;
    s.u_min = 0;
    s.u_max = M_PI;
    s.v_min = 0;
    s.v_max = 2 * M_PI;
    s.r = [R](double t, double f) {
        return Vec3{R * std::sin(t) * std::cos(f), R * std::sin(t) * std::sin(f), R * std::cos(t)};
    };
    s.r_u = [R](double t, double f) {
        return Vec3{R * std::cos(t) * std::cos(f), R * std::cos(t) * std::sin(f), -R * std::sin(t)};
    };
    s.r_v = [R](double t, double f) {
        return Vec3{-R * std::sin(t) * std::sin(f), R * std::sin(t) * std::cos(f), 0.0};
    };
    s.r_uu = [R](double t, double f) {
        return Vec3{-R * std::sin(t) * std::cos(f), -R * std::sin(t) * std::sin(f), -R * std::cos(t)};
    };
    s.r_uv = [R](double t, double f) {
        return Vec3{-R * std::cos(t) * std::sin(f), R * std::cos(t) * std::cos(f), 0.0};
    };
    s.r_vv = [R](double t, double f) {
        return Vec3{-R * std::sin(t) * std::cos(f), -R * std::sin(t) * std::sin(f), 0.0};
    };
    return s;
}

ParametricSurface cylinder_surface(double R, double half_height) {
    ParametricSurface s;
    s.name = "cylinder";
    s.u_min = 0;
    s.u_max = 2 * M_PI;
    s.v_min = -half_height;
    s.v_max = half_height;
    s.r = [R](double f, double z) { return Vec3{R * std::cos(f), R * std::sin(f), z}; };
    s.r_u = [R](double f, double) { return Vec3{-R * std::sin(f), R * std::cos(f), 0.0}; };
    s.r_v = [](double, double) { return Vec3{0.0, 0.0, 1.0}; };
    s.r_uu = [R](double f, double) { return Vec3{-R * std::cos(f), -R * std::sin(f), 0.0}; };
    s.r_uv = [](double, double) { return Vec3{0.0, 0.0, 0.0}; };
    s.r_vv = [](double, double) { return Vec3{0.0, 0.0, 0.0}; };
    return s;
}

ParametricSurface torus_surface(double Rm, double rm) {
    ParametricSurface s;
    s.name = "torus";
    s.u_min = 0;
    s.u_max = 2 * M_PI;
    s.v_min = 0;
    s.v_max = 2 * M_PI;
    s.r = [=](double f, double t) {
        const double a = Rm + rm * std::cos(t);
        return Vec3{a * std::cos(f), a * std::sin(f), rm * std::sin(t)};
    };
    s.r_u = [=](double f, double t) {
        const double a = Rm + rm * std::cos(t);
        return Vec3{-a * std::sin(f), a * std::cos(f), 0.0};
    };
    s.r_v = [=](double f, double t) {
        return Vec3{-rm * std::sin(t) * std::cos(f), -rm * std::sin(t) * std::sin(f), rm * std::cos(t)};
    };
    s.r_uu = [=](double f, double t) {
        const double a = Rm + rm * std::cos(t);
        return Vec3{-a * std::cos(f), -a * std::sin(f), 0.0};
    };
    s.r_uv = [=](double f, double t) {
        return Vec3{rm * std::sin(t) * std::sin(f), -rm * std::sin(t) * std::cos(f), 0.0};
    };
    s.r_vv = [=](double f, double t) {
        return Vec3{-rm * std::cos(t) * std::cos(f), -rm * std::cos(t) * std::sin(f), -rm * std::sin(t)};
    };
    return s;
}

ParametricSurface plane_surface() {
    ParametricSurface s;
    s.name = "plane";
    s.u_min = -1;
    s.u_max = 1;
    s.v_min = -1;
    s.v_max = 1;
    s.r = [](double u, double v) { return Vec3{u, v, 0.0}; };
    s.r_u = [](double, double) { return Vec3{1.0, 0.0, 0.0}; };
    s.r_v = [](double, double) { return Vec3{0.0, 1.0, 0.0}; };
    s.r_uu = s.r_uv = s.r_vv = [](double, double) { return Vec3{0.0, 0.0, 0.0}; };
    return s;
}

Curvatures curvatures(const ParametricSurface& surf, double u, double v) {
    const Jet j = jet(surf, u, v);
    const double E = dot(j.ru, j.ru), F = dot(j.ru, j.rv), G = dot(j.rv, j.rv);
    const double det = E * G - F * F;
    if (!(det > 1e-14 * E * G) || !std::isfinite(det))
        throw Error(ErrorKind::degenerate_metric, "irregular point on " + surf.name);
    Vec3 n = cross(j.ru, j.rv);
    n = mul(1.0 / std::sqrt(dot(n, n)), n);
    // second form taken against -n so that convex bodies with outward r_u x r_v get M > 0
    const double L = -dot(j.ruu, n), M2 = -dot(j.ruv, n), N = -dot(j.rvv, n);
    Curvatures c;
    c.K = (L * N - M2 * M2) / det;
    c.M = (E * N - 2.0 * F * M2 + G * L) / (2.0 * det);
    // shape operator in an orthonormal tangent basis via Cholesky of the metric
    const double a = std::sqrt(E), b = F / a, d = std::sqrt(G - b * b);
    // S~ = Lc^-1 II Lc^-T with Lc = [[a, 0], [b, d]]
    const double i00 = 1.0 / a, i10 = -b / (a * d), i11 = 1.0 / d;
    const double s00 = i00 * i00 * L;
    const double s01 = i00 * (i10 * L + i11 * M2);
    const double s11 = i10 * i10 * L + 2.0 * i10 * i11 * M2 + i11 * i11 * N;
    const double h = 0.5 * (s00 - s11);
    c.M2_minus_K = h * h + s01 * s01;
    return c;
}

double geometric_potential(const ParametricSurface& surf, double u, double v, const PhysParams& p) {
    p.validate();
    return -p.hbar * p.hbar / (2.0 * p.m) * curvatures(surf, u, v).M2_minus_K;
}

double derivative_mismatch(const ParametricSurface& surf, double u, double v) {
    const Jet fd = fd_jet(ParametricSurface{surf.name, surf.r, {}, {}, {}, {}, {}, surf.u_min, surf.u_max,
                                            surf.v_min, surf.v_max, surf.scale},
                          u, v);
    const Jet an = jet(surf, u, v);
    auto rel = [](const Vec3& a, const Vec3& b) {
        const Vec3 d = sub(a, b);
        return std::sqrt(dot(d, d)) / std::max(1.0, std::sqrt(dot(b, b)));
    };
    return std::max({rel(an.ru, fd.ru), rel(an.rv, fd.rv), rel(an.ruu, fd.ruu), rel(an.ruv, fd.ruv),
                     rel(an.rvv, fd.rvv)});
}

}  // namespace qgauss
