#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "pairshift/spectrum.hpp"

using namespace pairshift;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams params_for(double u, double v) {
    ModelParams p;
    p.kappa = 1.0;
    p.u = u;
    p.v = v;
    p.n_sites = 64;
    p.boundary = Boundary::Open;
    return p;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    return g;
}

// Shooting oracle for the bound state of the semi-infinite relative-
// coordinate chain: f(r) = x^{r-1} for r >= 1 with |x| < 1 and energy
// E = t (x + 1/x) must satisfy the matching conditions at r = 0 and 1,
// which combine into g(x) = t/x - V - 2 t^2/(E(x) - U) = 0.  The root on
// (-1, 0) u (0, 1) gives the bound energy without any diagonalization.
double shooting_bound_energy(double t, double u, double v) {
    auto energy = [&](double x) { return t * (x + 1.0 / x); };
    auto g = [&](double x) { return t / x - v - 2.0 * t * t / (energy(x) - u); };
    double best = NAN;
    for (double side : {-1.0, 1.0}) {
        const int scan = 4000;
        double prev_x = 1e-6 * side;
        double prev_g = g(prev_x);
        for (int i = 1; i <= scan; ++i) {
            const double x = side * (1e-6 + (1.0 - 2e-6) * i / scan);
            const double gx = g(x);
            if (std::isfinite(prev_g) && std::isfinite(gx) && prev_g * gx < 0.0) {
                double a = prev_x, b = x;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (a + b);
                    if (g(a) * g(mid) <= 0.0) b = mid;
                    else a = mid;
                }
                const double e = energy(0.5 * (a + b));
                if (std::abs(e) > 2.0 * std::abs(t) &&
                    (std::isnan(best) || std::abs(e) > std::abs(best))) {
                    best = e;
                }
            }
            prev_x = x;
            prev_g = gx;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("k-block solve returns an orthonormal spectrum with small residuals") {
    const auto block = build_k_block(params_for(20.0, 0.0), 0.8, 120, KBlockMode::Truncated);
    const auto sol = solve_k_block(block);
    const int n = static_cast<int>(sol.eigenvalues.size());
    REQUIRE(n == 121);
    CHECK((sol.eigenvectors.transpose() * sol.eigenvectors -
           Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < n; ++i) {
        const double res = (block.matrix * sol.eigenvectors.col(i) -
                            sol.eigenvalues[i] * sol.eigenvectors.col(i)).norm();
        CHECK(res <= 1e-10);
    }
}

TEST_CASE("largest eigenvalue at k = 0 matches the perturbative value and the shooting oracle") {
    const auto block = build_k_block(params_for(20.0, 0.0), 0.0, 200, KBlockMode::Truncated);
    const auto sol = solve_k_block(block);
    const double top = sol.eigenvalues[sol.eigenvalues.size() - 1];

    CHECK(std::abs(top - 20.4) < 0.02);  // U + 4 kappa^2/U (cos k + 1)

    const double oracle = shooting_bound_energy(block.t_k, 20.0, 0.0);
    CHECK(std::abs(top - oracle) < 1e-10);
}

TEST_CASE("bonding and anti-bonding states share weight between r = 0 and 1") {
    const ModelParams p = params_for(20.0, 20.0);
    const std::vector<double> grid = {0.0};
    const auto bonding = extract_branch(p, BranchType::Bonding, grid, 200);
    const auto anti = extract_branch(p, BranchType::AntiBonding, grid, 200);
    for (const auto& branch : {bonding, anti}) {
        CHECK(branch.weight_r0[0] > 0.3);
        CHECK(branch.weight_r1[0] > 0.3);
        CHECK(branch.weight_r0[0] + branch.weight_r1[0] > 0.9);
    }
    CHECK(bonding.energies[0] < anti.energies[0] - 1.0);
}

TEST_CASE("on-site branch: localization, symmetry, decay and smoothness") {
    const ModelParams p = params_for(20.0, 0.5);
    const auto grid = linspace(-kPi + 1e-3, kPi - 1e-3, 81);
    const auto branch = extract_branch(p, BranchType::OnSite, grid, 200);

    SUBCASE("profiles are unit-normalized and strongly localized") {
        for (std::size_t i = 0; i < branch.k_grid.size(); ++i) {
            CHECK(std::abs(branch.profiles[i].norm() - 1.0) < 1e-12);
            CHECK(branch.weight_r0[i] >= 0.9);
        }
    }

    SUBCASE("energy is even in k") {
        for (std::size_t i = 0; i < branch.k_grid.size(); ++i) {
            const std::size_t j = branch.k_grid.size() - 1 - i;
            CHECK(std::abs(branch.energies[i] - branch.energies[j]) < 1e-12);
        }
    }

    SUBCASE("profile tails decay monotonically") {
        const auto& f = branch.profiles[40];  // near k = 0
        int checked = 0;
        for (int r = 2; r + 1 < 30 && std::abs(f[r]) > 1e-12; ++r, ++checked) {
            CHECK(std::abs(f[r + 1]) < std::abs(f[r]));
        }
        CHECK(checked >= 5);
    }

    SUBCASE("branch energies are smooth in k") {
        const double bound = 4.0 * (2.0 / 20.0);
        for (std::size_t i = 0; i + 1 < branch.k_grid.size(); ++i) {
            const double dk = branch.k_grid[i + 1] - branch.k_grid[i];
            CHECK(std::abs(branch.energies[i + 1] - branch.energies[i]) <=
                  bound * dk + 1e-8);
        }
    }
}

TEST_CASE("nn branch localizes on r = 1 for strong V") {
    const ModelParams p = params_for(0.0, 20.0);
    const auto branch = extract_branch(p, BranchType::NearestNeighbor,
                                       linspace(0.0, kPi - 1e-3, 41), 200);
    for (double w : branch.weight_r1) CHECK(w >= 0.9);
}

TEST_CASE("branch extraction reports failure off-regime") {
    const ModelParams p = params_for(0.2, 0.0);  // no split-off state
    CHECK_THROWS_AS(extract_branch(p, BranchType::OnSite, {0.0}, 100),
                    std::runtime_error);
}

TEST_CASE("dispersion fit reproduces the effective hopping and bandwidth") {
    const ModelParams p = params_for(20.0, 0.0);
    const auto grid = linspace(0.0, kPi - 1e-4, 101);
    const auto branch = extract_branch(p, BranchType::OnSite, grid, 200);

    const auto [c0, c1] = fit_cosine_dispersion(branch.k_grid, branch.energies);
    CHECK(std::abs(c1 - 0.1) <= 0.005);  // 2 kappa^2 / U at U = 20
    (void)c0;

    const auto [emin, emax] =
        std::minmax_element(branch.energies.begin(), branch.energies.end());
    CHECK(std::abs((*emax - *emin) - 0.4) <= 0.02);  // 8 kappa^2 / U
}

TEST_CASE("perturbative error shrinks with U as expected") {
    auto max_error = [&](double u) {
        const ModelParams p = params_for(u, 0.0);
        const auto grid = linspace(0.0, kPi - 1e-4, 51);
        const auto branch = extract_branch(p, BranchType::OnSite, grid, 200);
        double e = 0.0;
        for (std::size_t i = 0; i < branch.k_grid.size(); ++i) {
            const double pert = u + 4.0 / u * (std::cos(branch.k_grid[i]) + 1.0);
            e = std::max(e, std::abs(branch.energies[i] - pert));
        }
        return e;
    };
    CHECK(max_error(40.0) / max_error(20.0) <= 0.3);
}

TEST_CASE("branch csv has the documented columns") {
    const ModelParams p = params_for(20.0, 0.0);
    const auto branch = extract_branch(p, BranchType::OnSite, {0.0, 0.5}, 60);
    std::ostringstream os;
    write_branch_csv(branch, os);
    const std::string text = os.str();
    CHECK(text.rfind("k,energy,weight_r0,weight_r1\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
