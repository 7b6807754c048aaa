#include "pairshift/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pairshift {

KBlockSolution solve_k_block(const KBlockMatrix& block) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block.matrix);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("k-block eigensolve failed");
    }
    KBlockSolution sol{solver.eigenvalues(), solver.eigenvectors()};

    const int n = static_cast<int>(sol.eigenvalues.size());
    const double scale = 1.0 + sol.eigenvalues.cwiseAbs().maxCoeff();

    // Sign convention: first component of nonnegligible magnitude positive.
    for (int i = 0; i < n; ++i) {
        auto v = sol.eigenvectors.col(i);
        const double vmax = v.cwiseAbs().maxCoeff();
        for (int r = 0; r < v.size(); ++r) {
            if (std::abs(v[r]) > 1e-12 * vmax) {
                if (v[r] < 0) sol.eigenvectors.col(i) = -v;
                break;
            }
        }
    }

    // Within degenerate groups, order by the index of the dominant component.
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && sol.eigenvalues[j] - sol.eigenvalues[i] <= 1e-12 * scale) ++j;
        if (j - i > 1) {
            std::vector<int> order(j - i);
            std::iota(order.begin(), order.end(), i);
            auto dominant = [&](int c) {
                int arg = 0;
                sol.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
                return arg;
            };
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return dominant(a) < dominant(b); });
            Eigen::MatrixXd cols(sol.eigenvectors.rows(), j - i);
            Eigen::VectorXd vals(j - i);
            for (int c = 0; c < j - i; ++c) {
                cols.col(c) = sol.eigenvectors.col(order[c]);
                vals[c] = sol.eigenvalues[order[c]];
            }
            sol.eigenvectors.block(0, i, cols.rows(), j - i) = cols;
            sol.eigenvalues.segment(i, j - i) = vals;
        }
        i = j;
    }
    return sol;
}

namespace {

double branch_weight(BranchType type, const Eigen::VectorXd& v) {
    const double w0 = v[0] * v[0];
    const double w1 = v.size() > 1 ? v[1] * v[1] : 0.0;
    switch (type) {
        case BranchType::OnSite: return w0;
        case BranchType::NearestNeighbor: return w1;
        case BranchType::Bonding:
        case BranchType::AntiBonding: return w0 + w1;
    }
    return 0.0;
}

bool bonding_like(const Eigen::VectorXd& v, double t_k) {
    // With coupling sqrt(2)*t_k between r=0 and r=1, the bonding combination
    // has f0*f1*t_k < 0 (it lies below the anti-bonding one).
    return v[0] * v[1] * t_k < 0.0;
}

}  // namespace

BoundStateBranch extract_branch(const ModelParams& params, BranchType type,
                                const std::vector<double>& k_grid, int n0,
                                KBlockMode mode) {
    if (k_grid.empty()) throw std::invalid_argument("empty momentum grid");

    BoundStateBranch branch;
    branch.type = type;

    Eigen::VectorXd prev;
    for (double k : k_grid) {
        const KBlockMatrix block = build_k_block(params, k, n0, mode);
        const KBlockSolution sol = solve_k_block(block);
        const int n = static_cast<int>(sol.eigenvalues.size());

        int pick = -1;
        if (prev.size() == 0) {
            double best = 0.5;  // localization threshold for seeding
            for (int i = 0; i < n; ++i) {
                const Eigen::VectorXd v = sol.eigenvectors.col(i);
                const double w = branch_weight(type, v);
                const bool kind_ok =
                    type == BranchType::OnSite || type == BranchType::NearestNeighbor ||
                    (type == BranchType::Bonding && bonding_like(v, block.t_k)) ||
                    (type == BranchType::AntiBonding && !bonding_like(v, block.t_k));
                if (kind_ok && w > best) {
                    best = w;
                    pick = i;
                }
            }
            if (pick < 0) {
                throw std::runtime_error("branch not found: no eigenstate exceeds the localization threshold");
            }
        } else {
            double best = 0.5;  // continuation overlap threshold
            for (int i = 0; i < n; ++i) {
                const double ov = std::abs(prev.dot(sol.eigenvectors.col(i)));
                if (ov > best) {
                    best = ov;
                    pick = i;
                }
            }
            if (pick < 0) {
                throw std::runtime_error("branch not found: lost continuity while following the branch in k");
            }
        }

        const Eigen::VectorXd v = sol.eigenvectors.col(pick);
        branch.k_grid.push_back(block.k);
        branch.energies.push_back(sol.eigenvalues[pick]);
        branch.weight_r0.push_back(v[0] * v[0]);
        branch.weight_r1.push_back(v[1] * v[1]);
        branch.profiles.push_back(v);
        prev = v;
    }
    return branch;
}

void write_branch_csv(const BoundStateBranch& branch, std::ostream& os) {
    os << "k,energy,weight_r0,weight_r1\n";
    char buf[160];
    for (std::size_t i = 0; i < branch.k_grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%.15g,%.15g\n", branch.k_grid[i],
                      branch.energies[i], branch.weight_r0[i], branch.weight_r1[i]);
        os << buf;
    }
}

std::pair<double, double> fit_cosine_dispersion(const std::vector<double>& k_grid,
                                                const std::vector<double>& energies) {
    if (k_grid.size() != energies.size() || k_grid.size() < 2) {
        throw std::invalid_argument("dispersion fit needs matching grids with >= 2 points");
    }
    const int m = static_cast<int>(k_grid.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = 2.0 * std::cos(k_grid[i]);
        b[i] = energies[i];
    }
    const Eigen::Vector2d c = (a.transpose() * a).ldlt().solve(a.transpose() * b);
    return {c[0], c[1]};
}

}  // namespace pairshift
