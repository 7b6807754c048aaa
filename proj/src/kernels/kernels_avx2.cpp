#include "pairshift/kernels.hpp"

// AVX2+FMA kernels.  This translation unit is compiled with -mavx2 -mfma on
// x86-64 only; the dispatcher never calls into it unless cpuid reports both
// features.  std::complex<double> arrays are interleaved (re, im) pairs, so
// one __m256d holds two complex numbers and one __m128d holds one.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace pairshift::kernels::detail {

namespace {

// (ar*xr - ai*xi, ar*xi + ai*xr) for two packed complex values.
inline __m256d cmul(__m256d vre, __m256d vim, __m256d x) {
    const __m256d xswap = _mm256_permute_pd(x, 0b0101);
    return _mm256_fmaddsub_pd(vre, x, _mm256_mul_pd(vim, xswap));
}

}  // namespace

void spmv_avx2(const CsrMatrix& a, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::int64_t r = 0; r < a.dim; ++r) {
        const std::int64_t begin = a.row_ptr[r];
        const std::int64_t end = a.row_ptr[r + 1];
        __m128d acc0 = _mm_setzero_pd();
        __m128d acc1 = _mm_setzero_pd();
        std::int64_t idx = begin;
        for (; idx + 1 < end; idx += 2) {
            const __m128d x0 = _mm_loadu_pd(xd + 2 * a.col[idx]);
            const __m128d x1 = _mm_loadu_pd(xd + 2 * a.col[idx + 1]);
            acc0 = _mm_fmadd_pd(_mm_set1_pd(a.val[idx]), x0, acc0);
            acc1 = _mm_fmadd_pd(_mm_set1_pd(a.val[idx + 1]), x1, acc1);
        }
        if (idx < end) {
            const __m128d x0 = _mm_loadu_pd(xd + 2 * a.col[idx]);
            acc0 = _mm_fmadd_pd(_mm_set1_pd(a.val[idx]), x0, acc0);
        }
        const __m128d acc = _mm_add_pd(acc0, acc1);
        _mm_storeu_pd(reinterpret_cast<double*>(y + r), acc);
    }
}

void axpy_avx2(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
    const __m256d are = _mm256_set1_pd(alpha.real());
    const __m256d aim = _mm256_set1_pd(alpha.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul(are, aim, xv)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(std::size_t n, cplx alpha, cplx* x) {
    const __m256d are = _mm256_set1_pd(alpha.real());
    const __m256d aim = _mm256_set1_pd(alpha.imag());
    double* xd = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(xd + 2 * i, cmul(are, aim, xv));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

cplx dot_avx2(std::size_t n, const cplx* x, const cplx* y) {
    // re lanes accumulate xr*yr and xi*yi, im lanes accumulate
    // -xi*yr and +xr*yi; the horizontal sums run in a fixed lane order.
    const __m256d sgn = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        const __m256d xs = _mm256_permute_pd(xv, 0b0101);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(_mm256_mul_pd(xs, yv), sgn, acc_im);
    }
    alignas(32) double re4[4], im4[4];
    _mm256_store_pd(re4, acc_re);
    _mm256_store_pd(im4, acc_im);
    double re = (re4[0] + re4[1]) + (re4[2] + re4[3]);
    double im = (im4[0] + im4[1]) + (im4[2] + im4[3]);
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

double nrm2_avx2(std::size_t n, const cplx* x) {
    __m256d acc = _mm256_setzero_pd();
    const double* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    alignas(32) double a4[4];
    _mm256_store_pd(a4, acc);
    double s = (a4[0] + a4[1]) + (a4[2] + a4[3]);
    for (; i < n; ++i) {
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return std::sqrt(s);
}

}  // namespace pairshift::kernels::detail

#endif  // x86-64
