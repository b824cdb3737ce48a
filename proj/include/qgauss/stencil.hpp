#pragma once

#include <vector>

namespace qgauss {

// Finite-difference weights for the derivative of order `order` at z from samples at xs
// (Fornberg's recursion).
std::vector<double> fd_weights(double z, const std::vector<double>& xs, int order);

// Non-periodic finite differences on a uniform grid: centered stencils in the interior,
// shifted one-sided stencils near the ends, same formal accuracy everywhere.
class FiniteDifference {
public:
    FiniteDifference() = default;
    FiniteDifference(int n, double dx, int accuracy = 6, int max_order = 3);

    // Derivative of order 1..max_order.
    std::vector<double> apply(const std::vector<double>& f, int order) const;
    void apply(const double* f, double* out, int order) const;
    int n() const { return n_; }

private:
    struct Op {
        int width = 0;
        std::vector<int> start;       // first stencil index per point
        std::vector<double> weights;  // n * width, row-major
    };
    int n_ = 0;
    std::vector<Op> ops_;
};

}  // namespace qgauss
