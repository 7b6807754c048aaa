#include "pairshift/kernels.hpp"

// NEON kernels for aarch64.  One float64x2_t holds one complex number.

#if defined(__aarch64__)

#include <arm_neon.h>

namespace pairshift::kernels::detail {

namespace {

const float64x2_t kSgn = {-1.0, 1.0};

// (ar*xr - ai*xi, ar*xi + ai*xr)
inline float64x2_t cmul(double ar, double ai, float64x2_t x) {
    const float64x2_t xs = vextq_f64(x, x, 1);           // (xi, xr)
    const float64x2_t t = vmulq_f64(vmulq_n_f64(xs, ai), kSgn);
    return vfmaq_n_f64(t, x, ar);
}

}  // namespace

void spmv_neon(const CsrMatrix& a, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::int64_t r = 0; r < a.dim; ++r) {
        const std::int64_t begin = a.row_ptr[r];
        const std::int64_t end = a.row_ptr[r + 1];
        float64x2_t acc0 = vdupq_n_f64(0.0);
        float64x2_t acc1 = vdupq_n_f64(0.0);
        std::int64_t idx = begin;
        for (; idx + 1 < end; idx += 2) {
            acc0 = vfmaq_n_f64(acc0, vld1q_f64(xd + 2 * a.col[idx]), a.val[idx]);
            acc1 = vfmaq_n_f64(acc1, vld1q_f64(xd + 2 * a.col[idx + 1]), a.val[idx + 1]);
        }
        if (idx < end) {
            acc0 = vfmaq_n_f64(acc0, vld1q_f64(xd + 2 * a.col[idx]), a.val[idx]);
        }
        vst1q_f64(reinterpret_cast<double*>(y + r), vaddq_f64(acc0, acc1));
    }
}

void axpy_neon(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t xv = vld1q_f64(xd + 2 * i);
        const float64x2_t yv = vld1q_f64(yd + 2 * i);
        vst1q_f64(yd + 2 * i, vaddq_f64(yv, cmul(alpha.real(), alpha.imag(), xv)));
    }
}

void scal_neon(std::size_t n, cplx alpha, cplx* x) {
    double* xd = reinterpret_cast<double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        vst1q_f64(xd + 2 * i, cmul(alpha.real(), alpha.imag(), vld1q_f64(xd + 2 * i)));
    }
}

cplx dot_neon(std::size_t n, const cplx* x, const cplx* y) {
    float64x2_t acc_re = vdupq_n_f64(0.0);
    float64x2_t acc_im = vdupq_n_f64(0.0);
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t xv = vld1q_f64(xd + 2 * i);
        const float64x2_t yv = vld1q_f64(yd + 2 * i);
        const float64x2_t xs = vextq_f64(xv, xv, 1);
        acc_re = vfmaq_f64(acc_re, xv, yv);                      // (xr*yr, xi*yi)
        acc_im = vfmaq_f64(acc_im, vmulq_f64(xs, kSgn), yv);     // (-xi*yr, xr*yi)
    }
    return {vgetq_lane_f64(acc_re, 0) + vgetq_lane_f64(acc_re, 1),
            vgetq_lane_f64(acc_im, 0) + vgetq_lane_f64(acc_im, 1)};
}

double nrm2_neon(std::size_t n, const cplx* x) {
    float64x2_t acc = vdupq_n_f64(0.0);
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t xv = vld1q_f64(xd + 2 * i);
        acc = vfmaq_f64(acc, xv, xv);
    }
    return std::sqrt(vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1));
}

}  // namespace pairshift::kernels::detail

#endif  // aarch64
