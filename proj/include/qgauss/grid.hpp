#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace qgauss {

using cplx = std::complex<double>;

// Uniform periodic grid x_j = x0 + j*dx on [x0, x0 + length).
// Copies share the FFT plans, so passing grids by value is cheap.
class Grid1D {
public:
    Grid1D() = default;

    int n() const;
    double x0() const;
    double length() const;
    double dx() const;
    double x(int j) const { return x0() + j * dx(); }
    std::vector<double> points() const;

    // Angular wavenumbers in FFT order: 2pi/L * {0, 1, .., n/2-1, -n/2, .., -1}.
    const std::vector<double>& k() const;

    bool valid() const { return impl_ != nullptr; }
    bool same_as(const Grid1D& o) const;

    // Derivatives of orders 1..max_order from one forward transform.
    // Odd orders drop the Nyquist mode so real input stays real.
    std::vector<std::vector<cplx>> spectral_derivatives(const std::vector<cplx>& f,
                                                        int max_order) const;

    void forward(const cplx* in, cplx* out) const;
    void backward(const cplx* in, cplx* out) const;  // unnormalized

    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
    friend Grid1D make_grid(int n, double x0, double length);
};

Grid1D make_grid(int n, double x0, double length);

struct RealField {
    Grid1D grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const Grid1D& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.n()), fill) {}
    RealField(const Grid1D& g, std::vector<double> v);

    size_t size() const { return values.size(); }
    double& operator[](size_t j) { return values[j]; }
    double operator[](size_t j) const { return values[j]; }
};

struct ComplexField {
    Grid1D grid;
    std::vector<cplx> values;

    ComplexField() = default;
    explicit ComplexField(const Grid1D& g, cplx fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.n()), fill) {}
    ComplexField(const Grid1D& g, std::vector<cplx> v);

    size_t size() const { return values.size(); }
    cplx& operator[](size_t j) { return values[j]; }
    cplx operator[](size_t j) const { return values[j]; }
};

RealField sample(const Grid1D& g, const std::function<double(double)>& f);
ComplexField sample_complex(const Grid1D& g, const std::function<cplx(double)>& f);

// Spectral derivative, order 1..3. Throws invalid_argument on non-finite input.
RealField derivative(const RealField& f, int order);
ComplexField derivative(const ComplexField& f, int order);

double integrate(const RealField& f);
double integrate(const Grid1D& g, const std::vector<double>& f);

// Sum over wavenumber space equivalent to integrate(|f|^2).
double parseval_sum(const ComplexField& f);

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* what);

}  // namespace qgauss
