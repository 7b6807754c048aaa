#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "pairshift/kernels.hpp"

using namespace pairshift::kernels;
using cplx = std::complex<double>;

namespace {

std::mt19937_64 rng(20240811);

std::vector<cplx> random_vec(std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) x = {dist(rng), dist(rng)};
    return v;
}

CsrMatrix random_csr(std::int64_t dim, int per_row) {
    std::uniform_int_distribution<std::int32_t> cols(0, static_cast<int>(dim - 1));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CsrMatrix m;
    m.dim = dim;
    m.row_ptr.push_back(0);
    for (std::int64_t r = 0; r < dim; ++r) {
        const int count = 1 + static_cast<int>(rng() % per_row);
        for (int i = 0; i < count; ++i) {
            m.col.push_back(cols(rng));
            m.val.push_back(dist(rng));
        }
        m.row_ptr.push_back(static_cast<std::int64_t>(m.col.size()));
    }
    return m;
}

}  // namespace

TEST_CASE("csr product matches a dense oracle") {
    const auto a = random_csr(37, 5);
    const auto x = random_vec(37);
    std::vector<cplx> y(37);
    spmv(a, x.data(), y.data());

    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(37, 37);
    for (std::int64_t r = 0; r < a.dim; ++r) {
        for (std::int64_t i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) {
            dense(r, a.col[i]) += a.val[i];
        }
    }
    Eigen::VectorXcd xv(37);
    for (int i = 0; i < 37; ++i) xv[i] = x[i];
    const Eigen::VectorXcd expect = dense * xv;
    for (int i = 0; i < 37; ++i) {
        CHECK(std::abs(y[i] - expect[i]) < 1e-12);
    }
}

TEST_CASE("scalar and simd variants agree") {
    const SimdLevel fast = detected_simd_level();
    if (fast == SimdLevel::Scalar) {
        MESSAGE("no SIMD variant on this machine; scalar only");
        return;
    }
    const KernelTable& ref = kernel_table(SimdLevel::Scalar);
    const KernelTable& simd = kernel_table(fast);

    for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 1001u}) {
        const auto x = random_vec(n);
        const auto y0 = random_vec(n);
        const cplx alpha{0.37, -1.21};

        auto y1 = y0, y2 = y0;
        ref.axpy(n, alpha, x.data(), y1.data());
        simd.axpy(n, alpha, x.data(), y2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-14);

        auto s1 = x, s2 = x;
        ref.scal(n, alpha, s1.data());
        simd.scal(n, alpha, s2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) < 1e-14);

        const cplx d1 = ref.dot(n, x.data(), y0.data());
        const cplx d2 = simd.dot(n, x.data(), y0.data());
        CHECK(std::abs(d1 - d2) < 1e-12 * (1.0 + std::abs(d1)));

        CHECK(ref.nrm2(n, x.data()) ==
              doctest::Approx(simd.nrm2(n, x.data())).epsilon(1e-13));
    }

    const auto a = random_csr(113, 7);
    const auto x = random_vec(113);
    std::vector<cplx> y1(113), y2(113);
    ref.spmv(a, x.data(), y1.data());
    simd.spmv(a, x.data(), y2.data());
    for (int i = 0; i < 113; ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-13);
}

TEST_CASE("kernels are deterministic run to run") {
    const auto a = random_csr(64, 6);
    const auto x = random_vec(64);
    std::vector<cplx> y1(64), y2(64);
    spmv(a, x.data(), y1.data());
    spmv(a, x.data(), y2.data());
    CHECK(std::equal(y1.begin(), y1.end(), y2.begin()));
    CHECK(dot(64, x.data(), y1.data()) == dot(64, x.data(), y2.data()));
}

TEST_CASE("unavailable variants are rejected") {
#if !defined(__aarch64__)
    CHECK_THROWS_AS((void)kernel_table(SimdLevel::Neon), std::invalid_argument);
#endif
    CHECK_NOTHROW((void)kernel_table(SimdLevel::Scalar));
}
