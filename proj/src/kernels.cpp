#include "cckm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace cckm::kern {

#ifndef CCKM_HAVE_AVX2
const Table* avx2_table() { return nullptr; }
#endif

Isa detected_isa() {
#if defined(__x86_64__) || defined(__i386__)
    if (avx2_table() && __builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

namespace {

Isa initial_isa() {
    const char* env = std::getenv("CCKM_FORCE_SCALAR");
    if (env && *env && std::strcmp(env, "0") != 0) return Isa::Scalar;
    return detected_isa();
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

Isa active_isa() { return current().load(); }

void set_isa(Isa isa) {
    if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
    current().store(isa);
}

const Table& active() {
    if (current().load() == Isa::Avx2) return *avx2_table();
    return scalar_table();
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace cckm::kern
