#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

// Inner-loop arithmetic kernels for the propagators and solvers.
//
// Every kernel exists as a scalar reference implementation plus SIMD
// variants (AVX2 on x86-64, NEON on aarch64) selected once at runtime.
// All variants use a fixed reduction order, so results are deterministic
// run-to-run on a given machine; scalar and SIMD variants are equivalent
// up to floating-point reassociation and are tested against each other.

namespace pairshift::kernels {

using cplx = std::complex<double>;

// Compressed sparse row storage for a real symmetric operator.  Both
// triangles are stored so the product is a plain ordered row sweep.
struct CsrMatrix {
    std::int64_t dim = 0;
    std::vector<std::int64_t> row_ptr;  // size dim+1
    std::vector<std::int32_t> col;
    std::vector<double> val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
};

enum class SimdLevel { Scalar, Avx2, Neon };

std::string to_string(SimdLevel level);

// Best level supported by the executing CPU.
SimdLevel detected_simd_level();

// Level used by the dispatching wrappers below.  Defaults to the detected
// level; the PAIRSHIFT_SIMD environment variable (scalar|avx2|neon) or
// set_simd_level() can force a lower one.
SimdLevel active_simd_level();
void set_simd_level(SimdLevel level);

// y = A x
void spmv(const CsrMatrix& a, const cplx* x, cplx* y);
// y += alpha * x
void axpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);
// x *= alpha
void scal(std::size_t n, cplx alpha, cplx* x);
// <x|y>, conjugating x
cplx dot(std::size_t n, const cplx* x, const cplx* y);
// Euclidean norm
double nrm2(std::size_t n, const cplx* x);

// Direct access to one variant, used by the equivalence tests.
struct KernelTable {
    void (*spmv)(const CsrMatrix&, const cplx*, cplx*);
    void (*axpy)(std::size_t, cplx, const cplx*, cplx*);
    void (*scal)(std::size_t, cplx, cplx*);
    cplx (*dot)(std::size_t, const cplx*, const cplx*);
    double (*nrm2)(std::size_t, const cplx*);
};

// Throws std::invalid_argument if the variant is not compiled in or the
// CPU cannot execute it.
const KernelTable& kernel_table(SimdLevel level);

}  // namespace pairshift::kernels
