#include "pairshift/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace pairshift::kernels {

namespace detail {

void spmv_scalar(const CsrMatrix&, const cplx*, cplx*);
void axpy_scalar(std::size_t, cplx, const cplx*, cplx*);
void scal_scalar(std::size_t, cplx, cplx*);
cplx dot_scalar(std::size_t, const cplx*, const cplx*);
double nrm2_scalar(std::size_t, const cplx*);

#if defined(__x86_64__) || defined(_M_X64)
void spmv_avx2(const CsrMatrix&, const cplx*, cplx*);
void axpy_avx2(std::size_t, cplx, const cplx*, cplx*);
void scal_avx2(std::size_t, cplx, cplx*);
cplx dot_avx2(std::size_t, const cplx*, const cplx*);
double nrm2_avx2(std::size_t, const cplx*);
#endif

#if defined(__aarch64__)
void spmv_neon(const CsrMatrix&, const cplx*, cplx*);
void axpy_neon(std::size_t, cplx, const cplx*, cplx*);
void scal_neon(std::size_t, cplx, cplx*);
cplx dot_neon(std::size_t, const cplx*, const cplx*);
double nrm2_neon(std::size_t, const cplx*);
#endif

}  // namespace detail

namespace {

const KernelTable kScalarTable = {
    detail::spmv_scalar, detail::axpy_scalar, detail::scal_scalar,
    detail::dot_scalar, detail::nrm2_scalar};

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable kAvx2Table = {
    detail::spmv_avx2, detail::axpy_avx2, detail::scal_avx2,
    detail::dot_avx2, detail::nrm2_avx2};
#endif

#if defined(__aarch64__)
const KernelTable kNeonTable = {
    detail::spmv_neon, detail::axpy_neon, detail::scal_neon,
    detail::dot_neon, detail::nrm2_neon};
#endif

SimdLevel initial_level() {
    SimdLevel level = detected_simd_level();
    if (const char* env = std::getenv("PAIRSHIFT_SIMD")) {
        const std::string s(env);
        if (s == "scalar") level = SimdLevel::Scalar;
        else if (s == "avx2" && detected_simd_level() == SimdLevel::Avx2) level = SimdLevel::Avx2;
        else if (s == "neon" && detected_simd_level() == SimdLevel::Neon) level = SimdLevel::Neon;
    }
    return level;
}

SimdLevel g_active = initial_level();

}  // namespace

std::string to_string(SimdLevel level) {
    switch (level) {
        case SimdLevel::Scalar: return "scalar";
        case SimdLevel::Avx2: return "avx2";
        case SimdLevel::Neon: return "neon";
    }
    return "unknown";
}

SimdLevel detected_simd_level() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return SimdLevel::Avx2;
    }
    return SimdLevel::Scalar;
#elif defined(__aarch64__)
    return SimdLevel::Neon;
#else
    return SimdLevel::Scalar;
#endif
}

SimdLevel active_simd_level() { return g_active; }

void set_simd_level(SimdLevel level) {
    kernel_table(level);  // validates availability
    g_active = level;
}

const KernelTable& kernel_table(SimdLevel level) {
    switch (level) {
        case SimdLevel::Scalar:
            return kScalarTable;
        case SimdLevel::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (detected_simd_level() == SimdLevel::Avx2) return kAvx2Table;
#endif
            break;
        case SimdLevel::Neon:
#if defined(__aarch64__)
            return kNeonTable;
#else
            break;
#endif
    }
    throw std::invalid_argument("SIMD level " + to_string(level) +
                                " is not available on this machine");
}

void spmv(const CsrMatrix& a, const cplx* x, cplx* y) { kernel_table(g_active).spmv(a, x, y); }
void axpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) { kernel_table(g_active).axpy(n, alpha, x, y); }
void scal(std::size_t n, cplx alpha, cplx* x) { kernel_table(g_active).scal(n, alpha, x); }
cplx dot(std::size_t n, const cplx* x, const cplx* y) { return kernel_table(g_active).dot(n, x, y); }
double nrm2(std::size_t n, const cplx* x) { return kernel_table(g_active).nrm2(n, x); }

}  // namespace pairshift::kernels
