#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pairshift/kernels.hpp"

// Lattice models: parameter records, many-body sector bases, real-space
// Hamiltonians for soft-core bosons and spin-1/2 fermions on a chain, and
// the center-of-mass momentum blocks of the two-particle problem.

namespace pairshift {

using cplx = std::complex<double>;
using VecZ = std::vector<cplx>;

enum class Statistics { Bose, FermiSpinHalf };
enum class Boundary { Periodic, Open };

// Couplings and chain geometry; the single source of physical truth.
// Energies are in units of the hopping kappa unless stated otherwise.
struct ModelParams {
    double kappa = 1.0;   // hopping
    double u = 0.0;       // on-site interaction
    double v = 0.0;       // nearest-neighbor interaction (bosons only)
    int n_sites = 0;
    Statistics statistics = Statistics::Bose;
    Boundary boundary = Boundary::Open;

    // Throws std::invalid_argument on kappa == 0, n_sites < 2, n_sites > 64,
    // or a nonzero v with Fermi statistics (the Fermi chain has no
    // nearest-neighbor term).
    void validate() const;
};

struct SectorSpec {
    int n_particles = 0;  // bosons: total count; fermions: n_up + n_down
    int n_up = 0;
    int n_down = 0;       // fermions only
};

// Packed occupation key.  Site 0 sits in the most significant bits, so the
// numeric order of keys coincides with lexicographic order on occupation
// vectors (for fermions: up vector first, then down vector).
struct ConfigKey {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    auto operator<=>(const ConfigKey&) const = default;
};

class SectorBasis {
public:
    ModelParams params;
    SectorSpec sector;
    std::vector<ConfigKey> configs;  // ascending = lexicographic

    std::int64_t dim() const { return static_cast<std::int64_t>(configs.size()); }

    // -1 if the configuration is not in the sector.
    std::int64_t index_of(const ConfigKey& key) const;

    // Bosons: per-site occupation (0..3).  Fermions: bit masks per spin.
    static ConfigKey pack_bose(const std::vector<std::uint8_t>& occ);
    static ConfigKey pack_fermi(std::uint64_t up_mask, std::uint64_t down_mask);
    std::vector<std::uint8_t> unpack_bose(std::int64_t index) const;
    std::pair<std::uint64_t, std::uint64_t> unpack_fermi(std::int64_t index) const;
};

// Deterministic, duplicate-free enumeration of the sector.  Bose dimension
// C(N+n-1, n); Fermi dimension C(N, n_up) * C(N, n_down).  Rejects sectors
// with more than 3 particles and fermion counts beyond Pauli capacity.
SectorBasis enumerate_basis(const ModelParams& params, const SectorSpec& sector);

// Real symmetric operator on a sector, stored once as the upper triangle
// and once as full-pattern CSR for products.  All chain Hamiltonians here
// are real in the occupation basis, so Hermitian == symmetric.
struct SparseHermitianOperator {
    std::int64_t dim = 0;
    std::vector<std::int64_t> rows;  // upper triangle, row <= col
    std::vector<std::int64_t> cols;
    std::vector<double> vals;
    kernels::CsrMatrix csr;

    void apply(const cplx* x, cplx* y) const { kernels::spmv(csr, x, y); }
    void apply(const VecZ& x, VecZ& y) const;
    cplx expectation(const VecZ& x) const;  // <x|A|x>
};

// Assembles the canonical form from (i, j, value) triplets with arbitrary
// order and duplicates (duplicates are summed); entries below the diagonal
// are reflected.
SparseHermitianOperator assemble_operator(
    std::int64_t dim, std::vector<std::int64_t> rows,
    std::vector<std::int64_t> cols, std::vector<double> vals);

// Hamiltonian of the chain restricted to the sector:
//   Bose:  -kappa sum_i (a_i^+ a_{i+1} + h.c.) + U/2 sum_i n_i(n_i-1)
//          + V sum_i n_i n_{i+1}
//   Fermi: -kappa sum_{i,s} (c_{i,s}^+ c_{i+1,s} + h.c.) + U sum_i n_up n_dn
// Bosonic elements carry the sqrt(n) ladder factors; fermionic elements the
// parity of reordering to the canonical mode order (site-major, up before
// down within a site).
SparseHermitianOperator build_real_space_hamiltonian(const ModelParams& params,
                                                     const SectorBasis& basis);

enum class KBlockMode { PeriodicExact, Truncated };

// Relative-coordinate block of the two-particle problem at center-of-mass
// momentum k.  t_k = -2 kappa cos(k/2); the [0][1] coupling carries a
// sqrt(2); for PeriodicExact grids (N = 2 n0 + 1 odd, k = 2 pi n / N) the
// last diagonal entry is (-1)^n t_k, for Truncated blocks it is zero.
struct KBlockMatrix {
    double k = 0.0;       // normalized to (-pi, pi]
    int n0 = 0;
    double t_k = 0.0;
    double boundary_t = 0.0;
    Eigen::MatrixXd matrix;
};

KBlockMatrix build_k_block(const ModelParams& params, double k, int n0,
                           KBlockMode mode);

// One-site shift on a periodic chain as a signed permutation of the basis.
void apply_translation(const SectorBasis& basis, const VecZ& in, VecZ& out);

// Dense extraction for testing; guarded to dim <= 5000.
Eigen::MatrixXd dense_matrix(const SparseHermitianOperator& op);

}  // namespace pairshift
