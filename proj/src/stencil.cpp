#include "qgauss/stencil.hpp"

#include <algorithm>

#include "qgauss/error.hpp"

namespace qgauss {

std::vector<double> fd_weights(double z, const std::vector<double>& xs, int order) {
    const int n = static_cast<int>(xs.size());
    if (n <= order) throw Error(ErrorKind::invalid_argument, "stencil too short for derivative order");
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k > 0; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k > 0; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

FiniteDifference::FiniteDifference(int n, double dx, int accuracy, int max_order) : n_(n) {
    if (accuracy < 2 || accuracy % 2) throw Error(ErrorKind::invalid_argument, "accuracy must be even");
    for (int d = 1; d <= max_order; ++d) {
        Op op;
        op.width = (accuracy + d - 1) / 2 * 2 + 1;
        if (op.width > n) throw Error(ErrorKind::invalid_argument, "grid too small for stencil");
        const int h = op.width / 2;
        op.start.resize(n);
        op.weights.resize(static_cast<size_t>(n) * op.width);
        double scale = 1.0;
        for (int k = 0; k < d; ++k) scale *= dx;
        for (int j = 0; j < n; ++j) {
            const int lo = std::min(std::max(j - h, 0), n - op.width);
            std::vector<double> offs(op.width);
            for (int i = 0; i < op.width; ++i) offs[i] = lo + i - j;
            auto w = fd_weights(0.0, offs, d);
            op.start[j] = lo;
            for (int i = 0; i < op.width; ++i) op.weights[static_cast<size_t>(j) * op.width + i] = w[i] / scale;
        }
        ops_.push_back(std::move(op));
    }
}

void FiniteDifference::apply(const double* f, double* out, int order) const {
    if (order < 1 || order > static_cast<int>(ops_.size()))
        throw Error(ErrorKind::invalid_argument, "unsupported finite-difference order");
    const Op& op = ops_[order - 1];
    for (int j = 0; j < n_; ++j) {
        const double* w = &op.weights[static_cast<size_t>(j) * op.width];
        const double* x = f + op.start[j];
        double s = 0.0;
        for (int i = 0; i < op.width; ++i) s += w[i] * x[i];
        out[j] = s;
    }
}

std::vector<double> FiniteDifference::apply(const std::vector<double>& f, int order) const {
    if (static_cast<int>(f.size()) != n_) throw Error(ErrorKind::grid_mismatch, "field size mismatch");
    std::vector<double> out(n_);
    apply(f.data(), out.data(), order);
    return out;
}

}  // namespace qgauss
