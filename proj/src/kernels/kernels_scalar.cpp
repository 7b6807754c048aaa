#include "pairshift/kernels.hpp"

// Reference kernels.  Plain sequential loops; the SIMD variants must agree
// with these up to floating-point reassociation.

namespace pairshift::kernels::detail {

void spmv_scalar(const CsrMatrix& a, const cplx* x, cplx* y) {
    for (std::int64_t r = 0; r < a.dim; ++r) {
        cplx acc = 0.0;
        const std::int64_t end = a.row_ptr[r + 1];
        for (std::int64_t idx = a.row_ptr[r]; idx < end; ++idx) {
            acc += a.val[idx] * x[a.col[idx]];
        }
        y[r] = acc;
    }
}

void axpy_scalar(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(std::size_t n, cplx alpha, cplx* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

cplx dot_scalar(std::size_t n, const cplx* x, const cplx* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

double nrm2_scalar(std::size_t n, const cplx* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return std::sqrt(acc);
}

}  // namespace pairshift::kernels::detail
