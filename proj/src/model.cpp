#include "pairshift/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pairshift {

namespace {

constexpr double kPi = std::numbers::pi;

// 2-bit occupation field for site j; site 0 at the top of hi.
void key_set(ConfigKey& key, int site, unsigned occ) {
    const int pos = 2 * site;
    if (pos < 64) {
        key.hi |= static_cast<std::uint64_t>(occ) << (62 - pos);
    } else {
        key.lo |= static_cast<std::uint64_t>(occ) << (62 - (pos - 64));
    }
}

unsigned key_get(const ConfigKey& key, int site) {
    const int pos = 2 * site;
    if (pos < 64) return (key.hi >> (62 - pos)) & 3u;
    return (key.lo >> (62 - (pos - 64))) & 3u;
}

int bond_count(const ModelParams& p) {
    return p.boundary == Boundary::Periodic ? p.n_sites : p.n_sites - 1;
}

}  // namespace

void ModelParams::validate() const {
    if (kappa == 0.0) throw std::invalid_argument("kappa must be nonzero");
    if (n_sites < 2) throw std::invalid_argument("n_sites must be at least 2");
    if (n_sites > 64) throw std::invalid_argument("n_sites must be at most 64");
    if (statistics == Statistics::FermiSpinHalf && v != 0.0) {
        throw std::invalid_argument(
            "the Fermi chain carries no nearest-neighbor interaction; v must be 0");
    }
}

std::int64_t SectorBasis::index_of(const ConfigKey& key) const {
    const auto it = std::lower_bound(configs.begin(), configs.end(), key);
    if (it == configs.end() || !(*it == key)) return -1;
    return it - configs.begin();
}

ConfigKey SectorBasis::pack_bose(const std::vector<std::uint8_t>& occ) {
    ConfigKey key;
    for (int j = 0; j < static_cast<int>(occ.size()); ++j) key_set(key, j, occ[j]);
    return key;
}

ConfigKey SectorBasis::pack_fermi(std::uint64_t up, std::uint64_t down) {
    // Up occupations fill hi (site 0 most significant), down occupations lo,
    // so key order is lexicographic on (up vector, down vector).
    ConfigKey key;
    for (int j = 0; j < 64; ++j) {
        if (up >> j & 1u) key.hi |= std::uint64_t(1) << (63 - j);
        if (down >> j & 1u) key.lo |= std::uint64_t(1) << (63 - j);
    }
    return key;
}

std::vector<std::uint8_t> SectorBasis::unpack_bose(std::int64_t index) const {
    const ConfigKey& key = configs[index];
    std::vector<std::uint8_t> occ(params.n_sites);
    for (int j = 0; j < params.n_sites; ++j) occ[j] = static_cast<std::uint8_t>(key_get(key, j));
    return occ;
}

std::pair<std::uint64_t, std::uint64_t> SectorBasis::unpack_fermi(std::int64_t index) const {
    const ConfigKey& key = configs[index];
    std::uint64_t up = 0, down = 0;
    for (int j = 0; j < params.n_sites; ++j) {
        if (key.hi >> (63 - j) & 1u) up |= std::uint64_t(1) << j;
        if (key.lo >> (63 - j) & 1u) down |= std::uint64_t(1) << j;
    }
    return {up, down};
}

namespace {

void enumerate_bose_rec(int site, int n_sites, int remaining,
                        std::vector<std::uint8_t>& occ,
                        std::vector<ConfigKey>& out) {
    if (site == n_sites - 1) {
        if (remaining <= 3) {
            occ[site] = static_cast<std::uint8_t>(remaining);
            out.push_back(SectorBasis::pack_bose(occ));
        }
        return;
    }
    for (int x = 0; x <= std::min(remaining, 3); ++x) {
        occ[site] = static_cast<std::uint8_t>(x);
        enumerate_bose_rec(site + 1, n_sites, remaining - x, occ, out);
    }
}

void enumerate_masks(int n_sites, int count, std::vector<std::uint64_t>& out) {
    // All masks with `count` bits among n_sites, in lexicographic order of
    // the occupation vector (site 0 first).
    std::vector<int> sites(count);
    out.clear();
    auto rec = [&](auto&& self, int pos, int next_site) -> void {
        if (pos == count) {
            std::uint64_t m = 0;
            for (int s : sites) m |= std::uint64_t(1) << s;
            out.push_back(m);
            return;
        }
        for (int s = next_site; s < n_sites; ++s) {
            sites[pos] = s;
            self(self, pos + 1, s + 1);
        }
    };
    rec(rec, 0, 0);
}

}  // namespace

SectorBasis enumerate_basis(const ModelParams& params, const SectorSpec& sector) {
    params.validate();
    SectorBasis basis;
    basis.params = params;
    basis.sector = sector;

    if (params.statistics == Statistics::Bose) {
        if (sector.n_particles < 0) throw std::invalid_argument("negative particle count");
        if (sector.n_particles > 3) {
            throw std::invalid_argument("sectors with more than 3 particles are not supported");
        }
        std::vector<std::uint8_t> occ(params.n_sites, 0);
        enumerate_bose_rec(0, params.n_sites, sector.n_particles, occ, basis.configs);
    } else {
        if (sector.n_up < 0 || sector.n_down < 0) {
            throw std::invalid_argument("negative particle count");
        }
        if (sector.n_up + sector.n_down > 3) {
            throw std::invalid_argument("sectors with more than 3 particles are not supported");
        }
        if (sector.n_up > params.n_sites || sector.n_down > params.n_sites) {
            throw std::invalid_argument("fermion sector exceeds Pauli capacity");
        }
        basis.sector.n_particles = sector.n_up + sector.n_down;
        std::vector<std::uint64_t> ups, downs;
        enumerate_masks(params.n_sites, sector.n_up, ups);
        enumerate_masks(params.n_sites, sector.n_down, downs);
        basis.configs.reserve(ups.size() * downs.size());
        for (std::uint64_t u : ups) {
            for (std::uint64_t d : downs) {
                basis.configs.push_back(SectorBasis::pack_fermi(u, d));
            }
        }
    }
    std::sort(basis.configs.begin(), basis.configs.end());
    return basis;
}

void SparseHermitianOperator::apply(const VecZ& x, VecZ& y) const {
    y.resize(x.size());
    kernels::spmv(csr, x.data(), y.data());
}

cplx SparseHermitianOperator::expectation(const VecZ& x) const {
    VecZ y(x.size());
    kernels::spmv(csr, x.data(), y.data());
    return kernels::dot(x.size(), x.data(), y.data());
}

SparseHermitianOperator assemble_operator(std::int64_t dim,
                                          std::vector<std::int64_t> rows,
                                          std::vector<std::int64_t> cols,
                                          std::vector<double> vals) {
    SparseHermitianOperator op;
    op.dim = dim;

    const std::size_t n_in = rows.size();
    std::vector<std::size_t> order(n_in);
    for (std::size_t i = 0; i < n_in; ++i) {
        if (rows[i] > cols[i]) std::swap(rows[i], cols[i]);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a] != rows[b]) return rows[a] < rows[b];
        return cols[a] < cols[b];
    });

    for (std::size_t i : order) {
        if (!op.rows.empty() && op.rows.back() == rows[i] && op.cols.back() == cols[i]) {
            op.vals.back() += vals[i];
        } else {
            op.rows.push_back(rows[i]);
            op.cols.push_back(cols[i]);
            op.vals.push_back(vals[i]);
        }
    }

    // Full-pattern CSR: count, fill, then sort each row by column so the
    // product sweeps memory in a fixed order.
    auto& csr = op.csr;
    csr.dim = dim;
    csr.row_ptr.assign(dim + 1, 0);
    for (std::size_t i = 0; i < op.rows.size(); ++i) {
        csr.row_ptr[op.rows[i] + 1]++;
        if (op.rows[i] != op.cols[i]) csr.row_ptr[op.cols[i] + 1]++;
    }
    for (std::int64_t r = 0; r < dim; ++r) csr.row_ptr[r + 1] += csr.row_ptr[r];
    csr.col.resize(csr.row_ptr[dim]);
    csr.val.resize(csr.row_ptr[dim]);
    std::vector<std::int64_t> fill(csr.row_ptr.begin(), csr.row_ptr.end() - 1);
    for (std::size_t i = 0; i < op.rows.size(); ++i) {
        const auto r = op.rows[i], c = op.cols[i];
        csr.col[fill[r]] = static_cast<std::int32_t>(c);
        csr.val[fill[r]++] = op.vals[i];
        if (r != c) {
            csr.col[fill[c]] = static_cast<std::int32_t>(r);
            csr.val[fill[c]++] = op.vals[i];
        }
    }
    for (std::int64_t r = 0; r < dim; ++r) {
        const auto b = csr.row_ptr[r], e = csr.row_ptr[r + 1];
        std::vector<std::pair<std::int32_t, double>> row(e - b);
        for (std::int64_t i = b; i < e; ++i) row[i - b] = {csr.col[i], csr.val[i]};
        std::sort(row.begin(), row.end());
        for (std::int64_t i = b; i < e; ++i) {
            csr.col[i] = row[i - b].first;
            csr.val[i] = row[i - b].second;
        }
    }
    return op;
}

namespace {

// Parity of occupied modes strictly below mode m = 2*site + spin
// (0 = up, 1 = down) in the canonical interleaved order.
int parity_below(std::uint64_t up, std::uint64_t down, int mode) {
    const auto mask = [](int nbits) {
        return nbits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << nbits) - 1;
    };
    const int up_sites = (mode + 1) >> 1;  // sites with 2*s < mode
    const int dn_sites = mode >> 1;        // sites with 2*s+1 < mode
    return (std::popcount(up & mask(up_sites)) + std::popcount(down & mask(dn_sites))) & 1;
}

SparseHermitianOperator build_bose_hamiltonian(const ModelParams& p,
                                               const SectorBasis& basis) {
    std::vector<std::int64_t> rows, cols;
    std::vector<double> vals;
    const int nb = bond_count(p);

    for (std::int64_t a = 0; a < basis.dim(); ++a) {
        const auto occ = basis.unpack_bose(a);
        double diag = 0.0;
        for (int j = 0; j < p.n_sites; ++j) {
            diag += 0.5 * p.u * occ[j] * (occ[j] - 1.0);
        }
        for (int b = 0; b < nb; ++b) {
            diag += p.v * occ[b] * occ[(b + 1) % p.n_sites];
        }
        if (diag != 0.0) {
            rows.push_back(a); cols.push_back(a); vals.push_back(diag);
        }
        for (int b = 0; b < nb; ++b) {
            const int i = b, j = (b + 1) % p.n_sites;
            for (auto [src, dst] : {std::pair{i, j}, std::pair{j, i}}) {
                if (occ[src] == 0 || occ[dst] >= 3) continue;
                auto t = occ;
                t[src]--; t[dst]++;
                const std::int64_t bidx = basis.index_of(SectorBasis::pack_bose(t));
                if (bidx < 0) throw std::logic_error("hop left the sector");
                if (bidx > a) {
                    rows.push_back(a);
                    cols.push_back(bidx);
                    vals.push_back(-p.kappa * std::sqrt(double(occ[src]) * (occ[dst] + 1.0)));
                }
            }
        }
    }
    return assemble_operator(basis.dim(), std::move(rows), std::move(cols), std::move(vals));
}

SparseHermitianOperator build_fermi_hamiltonian(const ModelParams& p,
                                                const SectorBasis& basis) {
    std::vector<std::int64_t> rows, cols;
    std::vector<double> vals;
    const int nb = bond_count(p);

    for (std::int64_t a = 0; a < basis.dim(); ++a) {
        auto [up, down] = basis.unpack_fermi(a);
        const double diag = p.u * std::popcount(up & down);
        if (diag != 0.0) {
            rows.push_back(a); cols.push_back(a); vals.push_back(diag);
        }
        for (int b = 0; b < nb; ++b) {
            const int i = b, j = (b + 1) % p.n_sites;
            for (auto [src, dst] : {std::pair{i, j}, std::pair{j, i}}) {
                for (int spin = 0; spin < 2; ++spin) {
                    std::uint64_t& m = spin == 0 ? up : down;
                    const std::uint64_t sbit = std::uint64_t(1) << src;
                    const std::uint64_t dbit = std::uint64_t(1) << dst;
                    if (!(m & sbit) || (m & dbit)) continue;
                    // c_dst^+ c_src with canonical-order parities
                    int par = parity_below(up, down, 2 * src + spin);
                    std::uint64_t u2 = up, d2 = down;
                    (spin == 0 ? u2 : d2) &= ~sbit;
                    par += parity_below(u2, d2, 2 * dst + spin);
                    (spin == 0 ? u2 : d2) |= dbit;
                    const std::int64_t bidx = basis.index_of(SectorBasis::pack_fermi(u2, d2));
                    if (bidx < 0) throw std::logic_error("hop left the sector");
                    if (bidx > a) {
                        rows.push_back(a);
                        cols.push_back(bidx);
                        vals.push_back(-p.kappa * (par & 1 ? -1.0 : 1.0));
                    }
                }
            }
        }
    }
    return assemble_operator(basis.dim(), std::move(rows), std::move(cols), std::move(vals));
}

}  // namespace

SparseHermitianOperator build_real_space_hamiltonian(const ModelParams& params,
                                                     const SectorBasis& basis) {
    params.validate();
    if (basis.params.n_sites != params.n_sites ||
        basis.params.statistics != params.statistics) {
        throw std::invalid_argument("basis was built for different model parameters");
    }
    return params.statistics == Statistics::Bose
               ? build_bose_hamiltonian(params, basis)
               : build_fermi_hamiltonian(params, basis);
}

KBlockMatrix build_k_block(const ModelParams& params, double k, int n0,
                           KBlockMode mode) {
    params.validate();
    if (n0 < 2) throw std::invalid_argument("k-block needs n0 >= 2");

    KBlockMatrix block;
    block.n0 = n0;

    // Normalize to (-pi, pi].  t_k and the boundary parity are computed from
    // the same representative; their product is representative-independent.
    double kn = std::remainder(k, 2.0 * kPi);
    if (kn <= -kPi) kn += 2.0 * kPi;
    block.k = kn;
    block.t_k = -2.0 * params.kappa * std::cos(kn / 2.0);

    if (mode == KBlockMode::PeriodicExact) {
        const int n_sites = 2 * n0 + 1;
        if (params.boundary != Boundary::Periodic) {
            throw std::invalid_argument("PeriodicExact blocks require periodic boundary");
        }
        if (params.n_sites != n_sites) {
            throw std::invalid_argument("PeriodicExact blocks require n_sites = 2*n0 + 1");
        }
        const double n_real = kn * n_sites / (2.0 * kPi);
        const long n_int = std::lround(n_real);
        if (std::abs(n_real - n_int) > 1e-9) {
            throw std::invalid_argument("k is not on the 2*pi*n/N momentum grid");
        }
        block.boundary_t = (n_int % 2 == 0 ? 1.0 : -1.0) * block.t_k;
    } else {
        block.boundary_t = 0.0;
    }

    Eigen::MatrixXd& m = block.matrix;
    m = Eigen::MatrixXd::Zero(n0 + 1, n0 + 1);
    m(0, 0) = params.u;
    m(1, 1) = params.v;
    m(0, 1) = m(1, 0) = std::sqrt(2.0) * block.t_k;
    for (int r = 1; r < n0; ++r) m(r, r + 1) = m(r + 1, r) = block.t_k;
    m(n0, n0) += block.boundary_t;
    return block;
}

void apply_translation(const SectorBasis& basis, const VecZ& in, VecZ& out) {
    const ModelParams& p = basis.params;
    if (p.boundary != Boundary::Periodic) {
        throw std::invalid_argument("translation requires a periodic chain");
    }
    out.assign(basis.dim(), 0.0);
    const int N = p.n_sites;
    if (p.statistics == Statistics::Bose) {
        for (std::int64_t a = 0; a < basis.dim(); ++a) {
            const auto occ = basis.unpack_bose(a);
            std::vector<std::uint8_t> t(N);
            for (int j = 0; j < N; ++j) t[(j + 1) % N] = occ[j];
            out[basis.index_of(SectorBasis::pack_bose(t))] += in[a];
        }
    } else {
        for (std::int64_t a = 0; a < basis.dim(); ++a) {
            auto [up, down] = basis.unpack_fermi(a);
            // Shift every occupied mode by one site and count the inversions
            // produced by the wrap-around.
            std::vector<int> modes;
            for (int j = 0; j < N; ++j) {
                if (up >> j & 1u) modes.push_back(2 * j);
                if (down >> j & 1u) modes.push_back(2 * j + 1);
            }
            std::sort(modes.begin(), modes.end());
            std::vector<int> shifted;
            for (int m : modes) shifted.push_back((m + 2) % (2 * N));
            int inversions = 0;
            for (std::size_t x = 0; x < shifted.size(); ++x) {
                for (std::size_t y = x + 1; y < shifted.size(); ++y) {
                    if (shifted[x] > shifted[y]) inversions++;
                }
            }
            std::uint64_t u2 = ((up << 1) | (up >> (N - 1))) & ((N == 64 ? 0 : (std::uint64_t(1) << N)) - 1);
            std::uint64_t d2 = ((down << 1) | (down >> (N - 1))) & ((N == 64 ? 0 : (std::uint64_t(1) << N)) - 1);
            const double sign = inversions & 1 ? -1.0 : 1.0;
            out[basis.index_of(SectorBasis::pack_fermi(u2, d2))] += sign * in[a];
        }
    }
}

Eigen::MatrixXd dense_matrix(const SparseHermitianOperator& op) {
    if (op.dim > 5000) {
        throw std::invalid_argument("dense extraction is limited to dim <= 5000");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(op.dim, op.dim);
    for (std::size_t i = 0; i < op.rows.size(); ++i) {
        m(op.rows[i], op.cols[i]) = op.vals[i];
        m(op.cols[i], op.rows[i]) = op.vals[i];
    }
    return m;
}

}  // namespace pairshift
