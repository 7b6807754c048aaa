#pragma once

#include <iosfwd>
#include <vector>

#include "pairshift/model.hpp"

// Bound-state analysis of the two-particle momentum blocks: full solves,
// branch identification and continuation in k, and CSV emission.

namespace pairshift {

struct KBlockSolution {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // column i belongs to eigenvalue i
};

// Full real spectrum with orthonormal eigenvectors.  Deterministic
// conventions: each vector's first nonzero component is positive, and
// within a degenerate group vectors are ordered by the site index of their
// largest-magnitude component.
KBlockSolution solve_k_block(const KBlockMatrix& block);

enum class BranchType { OnSite, NearestNeighbor, Bonding, AntiBonding };

struct BoundStateBranch {
    BranchType type;
    std::vector<double> k_grid;
    std::vector<double> energies;
    std::vector<double> weight_r0;  // |f^k(0)|^2
    std::vector<double> weight_r1;  // |f^k(1)|^2
    std::vector<Eigen::VectorXd> profiles;
};

// Follows one bound branch across the momentum grid.  The branch is seeded
// at the first grid point by localization weight (threshold 0.5) and then
// continued by maximal eigenvector overlap between neighboring momenta
// (threshold 0.5); either failure throws std::runtime_error.
BoundStateBranch extract_branch(const ModelParams& params, BranchType type,
                                const std::vector<double>& k_grid, int n0,
                                KBlockMode mode = KBlockMode::Truncated);

// Columns: k, energy, weight_r0, weight_r1.
void write_branch_csv(const BoundStateBranch& branch, std::ostream& os);

// Least-squares fit of energies(k) to c0 + 2*c1*cos(k); returns {c0, c1}.
std::pair<double, double> fit_cosine_dispersion(const std::vector<double>& k_grid,
                                                const std::vector<double>& energies);

}  // namespace pairshift
