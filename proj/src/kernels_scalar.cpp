#include "cckm/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cckm::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double inf_norm_scalar(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void sq_dist_row_scalar(const double* p, const double* Y, std::size_t m, std::size_t d, double* out) {
    for (std::size_t j = 0; j < m; ++j) {
        const double* y = Y + j * d;
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) {
            double e = p[t] - y[t];
            s += e * e;
        }
        out[j] = s;
    }
}

void nonneg_step_scalar(const double* v, double* y, double* s, const double* rho, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double w = v[i] + y[i] / rho[i];
        double p = w > 0.0 ? w : 0.0;
        s[i] = p;
        y[i] = rho[i] * (w - p);
    }
}

}  // namespace

const Table& scalar_table() {
    static const Table t{dot_scalar, inf_norm_scalar, axpby_scalar, sq_dist_row_scalar,
                         nonneg_step_scalar};
    return t;
}

}  // namespace cckm::kern
