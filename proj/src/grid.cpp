#include "qgauss/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

#include "qgauss/error.hpp"

namespace qgauss {

namespace {
// FFTW planning is not thread safe; execution with new-array calls is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Grid1D::Impl {
    int n = 0;
    double x0 = 0, length = 0, dx = 0;
    std::vector<double> k;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

Grid1D make_grid(int n, double x0, double length) {
    if (n < 8) throw Error(ErrorKind::invalid_argument, "grid needs n >= 8, got " + std::to_string(n));
    if (!(length > 0) || !std::isfinite(length))
        throw Error(ErrorKind::invalid_argument, "grid length must be positive");
    if (!std::isfinite(x0)) throw Error(ErrorKind::invalid_argument, "grid origin must be finite");

    auto impl = std::make_shared<Grid1D::Impl>();
    impl->n = n;
    impl->x0 = x0;
    impl->length = length;
    impl->dx = length / n;
    impl->k.resize(n);
    const double base = 2.0 * M_PI / length;
    for (int j = 0; j < n; ++j) impl->k[j] = base * (j < n / 2 ? j : j - n);

    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_complex* a = fftw_alloc_complex(n);
        fftw_complex* b = fftw_alloc_complex(n);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        impl->fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
        impl->bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
        fftw_free(a);
        fftw_free(b);
    }
    Grid1D g;
    g.impl_ = impl;
    return g;
}

int Grid1D::n() const { return impl_ ? impl_->n : 0; }
double Grid1D::x0() const { return impl_ ? impl_->x0 : 0.0; }
double Grid1D::length() const { return impl_ ? impl_->length : 0.0; }
double Grid1D::dx() const { return impl_ ? impl_->dx : 0.0; }

const std::vector<double>& Grid1D::k() const {
    static const std::vector<double> empty;
    return impl_ ? impl_->k : empty;
}

std::vector<double> Grid1D::points() const {
    std::vector<double> p(n());
    for (int j = 0; j < n(); ++j) p[j] = x(j);
    return p;
}

bool Grid1D::same_as(const Grid1D& o) const {
    if (impl_ == o.impl_) return true;
    if (!impl_ || !o.impl_) return false;
    return impl_->n == o.impl_->n && impl_->x0 == o.impl_->x0 && impl_->length == o.impl_->length;
}

void Grid1D::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Grid1D::backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(impl_->bwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

std::vector<std::vector<cplx>> Grid1D::spectral_derivatives(const std::vector<cplx>& f,
                                                            int max_order) const {
    const int nn = n();
    if (static_cast<int>(f.size()) != nn)
        throw Error(ErrorKind::grid_mismatch, "field size does not match grid");
    std::vector<cplx> fh(nn), tmp(nn);
    forward(f.data(), fh.data());
    std::vector<std::vector<cplx>> out;
    out.reserve(max_order);
    const double inv = 1.0 / nn;
    for (int p = 1; p <= max_order; ++p) {
        for (int j = 0; j < nn; ++j) {
            const double kj = impl_->k[j];
            cplx mult;
            switch (p % 4) {
                case 1: mult = cplx(0.0, std::pow(kj, p)); break;
                case 2: mult = -std::pow(kj, p); break;
                case 3: mult = cplx(0.0, -std::pow(kj, p)); break;
                default: mult = std::pow(kj, p); break;
            }
            if (j == nn / 2 && (p % 2 == 1)) mult = 0.0;
            tmp[j] = fh[j] * mult * inv;
        }
        std::vector<cplx> d(nn);
        backward(tmp.data(), d.data());
        out.push_back(std::move(d));
    }
    return out;
}

RealField::RealField(const Grid1D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.n())
        throw Error(ErrorKind::grid_mismatch, "real field size does not match grid");
}

ComplexField::ComplexField(const Grid1D& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.n())
        throw Error(ErrorKind::grid_mismatch, "complex field size does not match grid");
}

RealField sample(const Grid1D& g, const std::function<double(double)>& f) {
    RealField r(g);
    for (int j = 0; j < g.n(); ++j) r[j] = f(g.x(j));
    return r;
}

ComplexField sample_complex(const Grid1D& g, const std::function<cplx(double)>& f) {
    ComplexField r(g);
    for (int j = 0; j < g.n(); ++j) r[j] = f(g.x(j));
    return r;
}

static void check_order(int order) {
    if (order < 1 || order > 3)
        throw Error(ErrorKind::invalid_argument, "derivative order must be 1, 2 or 3");
}

RealField derivative(const RealField& f, int order) {
    check_order(order);
    std::vector<cplx> c(f.size());
    for (size_t j = 0; j < f.size(); ++j) {
        if (!std::isfinite(f[j])) throw Error(ErrorKind::invalid_argument, "non-finite field value");
        c[j] = f[j];
    }
    auto d = f.grid.spectral_derivatives(c, order);
    RealField r(f.grid);
    for (size_t j = 0; j < f.size(); ++j) r[j] = d.back()[j].real();
    return r;
}

ComplexField derivative(const ComplexField& f, int order) {
    check_order(order);
    for (const auto& z : f.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorKind::invalid_argument, "non-finite field value");
    auto d = f.grid.spectral_derivatives(f.values, order);
    return ComplexField(f.grid, std::move(d.back()));
}

double integrate(const Grid1D& g, const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.dx();
}

double integrate(const RealField& f) { return integrate(f.grid, f.values); }

double parseval_sum(const ComplexField& f) {
    const int nn = f.grid.n();
    std::vector<cplx> fh(nn);
    f.grid.forward(f.values.data(), fh.data());
    double s = 0.0;
    for (const auto& z : fh) s += std::norm(z);
    return s * f.grid.dx() / nn;
}

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* what) {
    if (!a.same_as(b)) throw Error(ErrorKind::grid_mismatch, std::string("grid mismatch: ") + what);
}

}  // namespace qgauss
