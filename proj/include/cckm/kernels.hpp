#pragma once

#include <cstddef>

// Hot loops with a portable scalar reference and an AVX2 variant picked at runtime.
// Elementwise kernels give bit-identical results across variants; reductions may
// differ in the last bits because of the lane-wise summation order.
namespace cckm::kern {

enum class Isa { Scalar, Avx2 };

struct Table {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*inf_norm)(const double* a, std::size_t n);
    // y <- a*x + b*y
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    // out[j] = ||p - Y_j||^2 for the m rows of the row-major m x d matrix Y
    void (*sq_dist_row)(const double* p, const double* Y, std::size_t m, std::size_t d, double* out);
    // ADMM update on nonnegative rows: s = max(v + y/rho, 0), y <- rho*(v + y/rho - s).
    // Here v is the relaxed slack estimate; y is the multiplier of the slack constraint.
    void (*nonneg_step)(const double* v, double* y, double* s, const double* rho, std::size_t n);
};

const Table& scalar_table();
// nullptr when the binary was built without AVX2 support
const Table* avx2_table();

Isa detected_isa();
Isa active_isa();
// Overrides dispatch; the CCKM_FORCE_SCALAR environment variable does the same at startup.
void set_isa(Isa isa);
const Table& active();

const char* isa_name(Isa isa);

}  // namespace cckm::kern
