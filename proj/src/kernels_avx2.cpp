// Compiled with -mavx2 only. FMA stays off so elementwise results match the scalar path.
#include "cckm/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace cckm::kern {
namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double inf_norm_avx2(const double* a, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(a + i), mask));
    alignas(32) double buf[4];
    _mm256_store_pd(buf, m);
    double r = std::max(std::max(buf[0], buf[1]), std::max(buf[2], buf[3]));
    for (; i < n; ++i) r = std::max(r, std::fabs(a[i]));
    return r;
}

void axpby_avx2(double a, const double* x, double b, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                  _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

// Vectorized across the m target rows, so each output keeps the scalar summation order.
void sq_dist_row_avx2(const double* p, const double* Y, std::size_t m, std::size_t d, double* out) {
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        __m256d s = _mm256_setzero_pd();
        for (std::size_t t = 0; t < d; ++t) {
            __m256d y = _mm256_set_pd(Y[(j + 3) * d + t], Y[(j + 2) * d + t], Y[(j + 1) * d + t],
                                      Y[j * d + t]);
            __m256d e = _mm256_sub_pd(_mm256_set1_pd(p[t]), y);
            s = _mm256_add_pd(s, _mm256_mul_pd(e, e));
        }
        _mm256_storeu_pd(out + j, s);
    }
    for (; j < m; ++j) {
        const double* y = Y + j * d;
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) {
            double e = p[t] - y[t];
            s += e * e;
        }
        out[j] = s;
    }
}

void nonneg_step_avx2(const double* v, double* y, double* s, const double* rho, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_loadu_pd(rho + i);
        __m256d w = _mm256_add_pd(_mm256_loadu_pd(v + i), _mm256_div_pd(_mm256_loadu_pd(y + i), r));
        __m256d p = _mm256_max_pd(w, zero);
        _mm256_storeu_pd(s + i, p);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(r, _mm256_sub_pd(w, p)));
    }
    for (; i < n; ++i) {
        double w = v[i] + y[i] / rho[i];
        double p = w > 0.0 ? w : 0.0;
        s[i] = p;
        y[i] = rho[i] * (w - p);
    }
}

}  // namespace

const Table* avx2_table() {
    static const Table t{dot_avx2, inf_norm_avx2, axpby_avx2, sq_dist_row_avx2, nonneg_step_avx2};
    return &t;
}

}  // namespace cckm::kern
