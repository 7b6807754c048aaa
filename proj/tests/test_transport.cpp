#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pairshift/effective.hpp"
#include "pairshift/transport.hpp"

using namespace pairshift;

namespace {

constexpr double kPi = std::numbers::pi;

ImpurityChain onsite_chain(double kappa, double v) {
    ModelParams p;
    p.kappa = kappa;
    p.v = v;
    p.u = 100.0;
    p.n_sites = 8;
    return reduce_to_impurity_chain(p, EffectiveKind::OnsiteBose);
}

ImpurityChain uniform_chain(double kappa) {
    ModelParams p;
    p.kappa = kappa;
    p.u = 100.0;
    p.n_sites = 8;
    return reduce_to_impurity_chain(p, EffectiveKind::FermiSinglet);
}

}  // namespace

TEST_CASE("closed form at the pinned points") {
    CHECK(std::abs(analytic_T12(1.0, 0.0, kPi / 2) - 0.64) < 1e-15);  // 16/25
    CHECK(std::abs(analytic_T12(1.0, std::sqrt(3.0) / 2.0, kPi / 3) - 0.8) < 1e-12);
    CHECK(std::abs(analytic_T12(1.0, std::sqrt(3.0) / 2.0, kPi / 2) - 1.0) < 1e-12);
    CHECK(analytic_T12(2.3, -0.7, 1e-12) < 1e-20);  // sin k -> 0
    CHECK_THROWS_AS(analytic_T12(0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("resonant couplings") {
    const auto [vp, vm] = resonance_V(1.0, kPi / 2);
    CHECK(std::abs(vp - std::sqrt(3.0) / 2.0) < 1e-15);
    CHECK(std::abs(vm + std::sqrt(3.0) / 2.0) < 1e-15);

    const auto [vp0, vm0] = resonance_V(1.0, 0.0);
    CHECK(vp0 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(vm0 == doctest::Approx(-1.5).epsilon(1e-15));

    for (double k = 0.1; k < kPi; k += 0.1) {
        const auto [a, b] = resonance_V(1.3, k);
        CHECK(std::abs(a * b + 3.0 * 1.3 * 1.3 / 4.0) < 1e-12);  // Vieta
        CHECK(std::abs(analytic_T12(1.3, a, k) - 1.0) < 1e-12);
        CHECK(std::abs(analytic_T12(1.3, b, k) - 1.0) < 1e-12);
    }
}

TEST_CASE("negf on the two-site impurity against the closed form") {
    const auto chain = onsite_chain(1.0, 0.0);
    CHECK(chain.device_potentials == std::vector<double>{0.0, 0.0});
    CHECK(chain.device_hoppings == std::vector<double>{-1.0, -2.0, -1.0});

    const auto res = negf_transmission(chain, kPi / 2);
    CHECK(std::abs(res.T - 0.64) < 1e-12);
    CHECK(std::abs(res.R - 0.36) < 1e-12);
    CHECK(std::abs(res.energy) < 1e-12);

    const auto resonant = negf_transmission(onsite_chain(1.0, std::sqrt(3.0) / 2.0), kPi / 2);
    CHECK(std::abs(resonant.T - 1.0) < 1e-12);
}

TEST_CASE("uniform chains transmit perfectly") {
    for (double k : {0.3, kPi / 2, 2.9}) {
        const auto negf = negf_transmission(uniform_chain(1.0), k);
        CHECK(negf.T == 1.0);
        const auto pw = planewave_scattering(uniform_chain(1.0), k);
        CHECK(std::abs(*pw.t_amp - cplx(1.0, 0.0)) < 1e-15);
        CHECK(std::abs(*pw.r_amp) < 1e-15);
    }
}

TEST_CASE("plane-wave amplitudes conserve flux and match negf") {
    const auto chain = onsite_chain(1.0, 0.0);
    const auto res = planewave_scattering(chain, kPi / 2);
    CHECK(std::abs(std::norm(*res.t_amp) - 0.64) < 1e-10);
    CHECK(std::abs(res.T + res.R - 1.0) < 1e-12);

    for (double v = -2.0; v <= 2.0; v += 0.37) {
        for (double k = 0.11; k < kPi; k += 0.23) {
            const auto c = onsite_chain(1.0, v);
            const auto pw = planewave_scattering(c, k);
            CHECK(std::abs(std::norm(*pw.r_amp) + std::norm(*pw.t_amp) - 1.0) < 1e-12);
            CHECK(std::abs(pw.T - negf_transmission(c, k).T) < 1e-10);
        }
    }
}

TEST_CASE("three routes agree on the 50x50 grid") {
    double max_na = 0.0, max_pa = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double k = 0.05 + (kPi - 0.1) * i / 49.0;
        for (int j = 0; j < 50; ++j) {
            const double v = -2.0 + 4.0 * j / 49.0;
            const auto chain = onsite_chain(1.0, v);
            const double ta = analytic_T12(1.0, v, k);
            max_na = std::max(max_na, std::abs(negf_transmission(chain, k).T - ta));
            max_pa = std::max(max_pa, std::abs(planewave_scattering(chain, k).T - ta));
        }
    }
    CHECK(max_na <= 1e-10);
    CHECK(max_pa <= 1e-10);
}

TEST_CASE("mirror symmetry T(k, V) = T(pi - k, -V)") {
    for (int i = 1; i < 20; ++i) {
        const double k = kPi * i / 20.0;
        for (double v = -2.0; v <= 2.0; v += 0.5) {
            CHECK(std::abs(analytic_T12(1.0, v, k) - analytic_T12(1.0, -v, kPi - k)) < 1e-12);
        }
    }
}

TEST_CASE("dense scan finds no transmission above the resonance") {
    double best_t = 0.0, best_v = 0.0;
    for (double v = -2.0; v <= 2.0 + 1e-9; v += 1e-3) {
        const double t = analytic_T12(1.0, v, kPi / 2);
        CHECK(t <= 1.0 + 1e-12);
        if (t > best_t) {
            best_t = t;
            best_v = v;
        }
    }
    CHECK(best_t == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(std::abs(best_v) - std::sqrt(3.0) / 2.0) < 2e-3);
}

TEST_CASE("momentum endpoints are rejected") {
    const auto chain = onsite_chain(1.0, 0.3);
    CHECK_THROWS_AS(negf_transmission(chain, 0.0), std::domain_error);
    CHECK_THROWS_AS(negf_transmission(chain, kPi), std::domain_error);
    CHECK_THROWS_AS(planewave_scattering(chain, -0.2), std::domain_error);
}

TEST_CASE("finite chain embedding places the device correctly") {
    const auto chain = onsite_chain(1.0, 0.25);
    const Eigen::MatrixXd m = chain.finite_matrix(3, 2);
    REQUIRE(m.rows() == 7);
    CHECK(m(2, 3) == -1.0);   // entry bond
    CHECK(m(3, 4) == -2.0);   // internal bond
    CHECK(m(4, 5) == -1.0);   // exit bond
    CHECK(m(3, 3) == 0.5);    // 2V
    CHECK(m(4, 4) == 0.5);
    CHECK(m(0, 1) == -1.0);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
}
