#include "pairshift/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace pairshift {

namespace {

constexpr double kPi = std::numbers::pi;

int pair_width(EffectiveKind kind) { return kind == EffectiveKind::NNBose ? 2 : 1; }

// Signed distance from b to a, ring-aware on periodic chains.
double signed_distance(int a, int b, const ModelParams& p) {
    if (p.boundary == Boundary::Open) return a - b;
    const int n = p.n_sites;
    int d = (a - b) % n;
    if (d < 0) d += n;
    if (d > n / 2) d -= n;
    return d;
}

}  // namespace

PacketWindow default_window(const ModelParams& params, const WavepacketSpec& wp,
                            const BoundPairSpec& bp, double radius_sigmas,
                            int taper) {
    const int radius = std::max(2, static_cast<int>(std::lround(radius_sigmas * wp.sigma)));
    PacketWindow w;
    const int limit = bp.position - (bp.kind == EffectiveKind::NNBose ? 2 : 1);
    w.lo = std::max(0, wp.center - radius);
    w.hi = std::min({params.n_sites - 1, wp.center + radius, limit});
    w.taper = taper >= 0 ? taper : std::max(3, static_cast<int>(std::lround(wp.sigma / 2.0)));
    return w;
}

VecZ packet_envelope(const ModelParams& params, const WavepacketSpec& wp,
                     const PacketWindow& window) {
    if (wp.sigma < 2.0) throw std::invalid_argument("packet width sigma must be >= 2 sites");
    if (!(std::abs(wp.k0) > 0.0 && std::abs(wp.k0) < kPi)) {
        throw std::invalid_argument("|k0| must lie strictly inside (0, pi)");
    }
    if (window.lo < 0 || window.hi >= params.n_sites || window.lo > window.hi) {
        throw std::invalid_argument("packet window does not fit inside the chain");
    }
    if (window.hi - window.lo + 1 < 5) {
        throw std::invalid_argument("packet window too narrow");
    }
    VecZ env(params.n_sites, 0.0);
    const int width = window.hi - window.lo;
    const int taper = std::min(window.taper, width / 2);
    for (int j = window.lo; j <= window.hi; ++j) {
        const double d = (j - wp.center) / (2.0 * wp.sigma);
        double g = std::exp(-d * d);
        const int to_edge = std::min(j - window.lo, window.hi - j);
        if (to_edge < taper) {
            const double s = std::sin(0.5 * kPi * (to_edge + 1.0) / (taper + 1.0));
            g *= s * s;
        }
        env[j] = g * std::exp(cplx(0.0, wp.k0 * j));
    }
    return env;
}

double mean_momentum(const VecZ& amplitudes) {
    const auto dist = momentum_distribution(amplitudes);
    double mean = 0.0, total = 0.0;
    for (const auto& [k, w] : dist) {
        mean += k * w;
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("empty amplitude vector");
    return mean / total;
}

std::vector<std::pair<double, double>> momentum_distribution(const VecZ& amplitudes) {
    const int n = static_cast<int>(amplitudes.size());
    std::vector<std::pair<double, double>> dist;
    dist.reserve(n);
    for (int m = 0; m < n; ++m) {
        double k = 2.0 * kPi * m / n;
        if (k > kPi) k -= 2.0 * kPi;
        cplx c = 0.0;
        for (int j = 0; j < n; ++j) {
            c += amplitudes[j] * std::exp(cplx(0.0, -k * j));
        }
        dist.emplace_back(k, std::norm(c) / n);
    }
    std::sort(dist.begin(), dist.end());
    return dist;
}

namespace {

// Parity of occupied modes below mode 2*site+spin, canonical interleaved
// order (duplicated from the model builder; local to state preparation).
int parity_below(std::uint64_t up, std::uint64_t down, int mode) {
    const auto mask = [](int nbits) {
        return nbits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << nbits) - 1;
    };
    return (std::popcount(up & mask((mode + 1) >> 1)) +
            std::popcount(down & mask(mode >> 1))) & 1;
}

// Two-particle state holding the bare pair, optionally projected onto the
// bound part of the two-particle spectrum.
VecZ pair_state(const ModelParams& params, const BoundPairSpec& bp,
                const SectorBasis& basis2) {
    VecZ w(basis2.dim(), 0.0);
    if (params.statistics == Statistics::Bose) {
        std::vector<std::uint8_t> occ(params.n_sites, 0);
        if (bp.kind == EffectiveKind::NNBose) {
            occ[bp.position] = 1;
            occ[bp.position + 1] = 1;
        } else {
            occ[bp.position] = 2;
        }
        w[basis2.index_of(SectorBasis::pack_bose(occ))] = 1.0;
    } else {
        const std::uint64_t bit = std::uint64_t(1) << bp.position;
        w[basis2.index_of(SectorBasis::pack_fermi(bit, bit))] = 1.0;
    }
    if (bp.preparation == Preparation::Bare) return w;

    // Dressed: project onto eigenstates split off the two-particle
    // scattering band (|E| beyond the 4 kappa band edge).
    const SparseHermitianOperator h2 = build_real_space_hamiltonian(params, basis2);
    const Eigen::MatrixXd dense = dense_matrix(h2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    const double edge = 4.0 * std::abs(params.kappa) + 0.5;
    Eigen::Map<Eigen::VectorXcd> wv(w.data(), w.size());
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(w.size());
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
        if (std::abs(solver.eigenvalues()[i]) <= edge) continue;
        const Eigen::VectorXd v = solver.eigenvectors().col(i);
        proj += v.cast<cplx>() * (v.cast<cplx>().adjoint() * wv);
    }
    const double norm = proj.norm();
    if (norm < 0.5) {
        throw std::runtime_error("dressed preparation failed: bare pair has weight < 0.5 in the bound subspace");
    }
    VecZ out(w.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = proj[i] / norm;
    return out;
}

}  // namespace

VecZ prepare_scattering_state(const SectorBasis& basis, const WavepacketSpec& wp,
                              const BoundPairSpec& bp, const PacketWindow& window) {
    const ModelParams& params = basis.params;
    const int pw = pair_width(bp.kind);
    if (bp.position < 0 || bp.position + pw > params.n_sites) {
        throw std::invalid_argument("pair position outside the chain");
    }
    if (window.hi >= bp.position - (bp.kind == EffectiveKind::NNBose ? 1 : 0)) {
        throw std::invalid_argument("packet window overlaps the pair");
    }
    if ((params.statistics == Statistics::Bose) !=
        (bp.kind != EffectiveKind::FermiSinglet)) {
        throw std::invalid_argument("pair kind does not match the basis statistics");
    }
    if (params.statistics == Statistics::Bose && basis.sector.n_particles != 3) {
        throw std::invalid_argument("bosonic scattering needs the 3-particle sector");
    }
    if (params.statistics == Statistics::FermiSpinHalf &&
        !((basis.sector.n_up == 2 && basis.sector.n_down == 1) ||
          (basis.sector.n_up == 1 && basis.sector.n_down == 2))) {
        throw std::invalid_argument("fermionic scattering needs the (2,1) or (1,2) sector");
    }

    const VecZ env = packet_envelope(params, wp, window);

    // Two-particle carrier of the pair...
    SectorSpec sec2;
    if (params.statistics == Statistics::Bose) {
        sec2.n_particles = 2;
    } else {
        sec2.n_particles = 2;
        sec2.n_up = 1;
        sec2.n_down = 1;
    }
    const SectorBasis basis2 = enumerate_basis(params, sec2);
    const VecZ pair = pair_state(params, bp, basis2);

    // ...lifted by the packet's creation operator.
    VecZ psi(basis.dim(), 0.0);
    if (params.statistics == Statistics::Bose) {
        for (std::int64_t a = 0; a < basis2.dim(); ++a) {
            if (pair[a] == cplx(0.0)) continue;
            const auto occ2 = basis2.unpack_bose(a);
            for (int j = window.lo; j <= window.hi; ++j) {
                if (env[j] == cplx(0.0) || occ2[j] >= 3) continue;
                auto occ3 = occ2;
                occ3[j]++;
                const std::int64_t b = basis.index_of(SectorBasis::pack_bose(occ3));
                psi[b] += pair[a] * env[j] * std::sqrt(occ2[j] + 1.0);
            }
        }
    } else {
        const bool up_incident = basis.sector.n_up == 2;
        for (std::int64_t a = 0; a < basis2.dim(); ++a) {
            if (pair[a] == cplx(0.0)) continue;
            auto [up, down] = basis2.unpack_fermi(a);
            for (int j = window.lo; j <= window.hi; ++j) {
                if (env[j] == cplx(0.0)) continue;
                const std::uint64_t bit = std::uint64_t(1) << j;
                std::uint64_t u2 = up, d2 = down;
                if (up_incident) {
                    if (u2 & bit) continue;  // Pauli blocked
                    u2 |= bit;
                } else {
                    if (d2 & bit) continue;
                    d2 |= bit;
                }
                const int par = parity_below(up, down, 2 * j + (up_incident ? 0 : 1));
                const std::int64_t b = basis.index_of(SectorBasis::pack_fermi(u2, d2));
                psi[b] += pair[a] * env[j] * (par ? -1.0 : 1.0);
            }
        }
    }

    const double norm = kernels::nrm2(psi.size(), psi.data());
    if (norm < 1e-12) throw std::runtime_error("prepared state has vanishing norm");
    kernels::scal(psi.size(), 1.0 / norm, psi.data());
    return psi;
}

// --- propagation ---------------------------------------------------------

StepResult lanczos_step(const SparseHermitianOperator& h, VecZ& psi, double dt,
                        double tol, int m_max) {
    const std::size_t n = psi.size();
    const double beta0 = kernels::nrm2(n, psi.data());
    if (beta0 == 0.0) throw std::invalid_argument("cannot propagate the zero vector");

    std::vector<VecZ> basis;
    basis.emplace_back(psi);
    kernels::scal(n, 1.0 / beta0, basis[0].data());

    std::vector<double> alpha, beta;  // T diagonal / off-diagonal
    VecZ w(n);
    Eigen::VectorXcd u_prev;

    for (int j = 0; j < m_max; ++j) {
        h.apply(basis[j].data(), w.data());
        if (j > 0) kernels::axpy(n, -beta[j - 1], basis[j - 1].data(), w.data());
        const double a = kernels::dot(n, basis[j].data(), w.data()).real();
        alpha.push_back(a);
        kernels::axpy(n, -a, basis[j].data(), w.data());
        // full reorthogonalization
        for (int i = 0; i <= j; ++i) {
            const cplx c = kernels::dot(n, basis[i].data(), w.data());
            kernels::axpy(n, -c, basis[i].data(), w.data());
        }
        const double b = kernels::nrm2(n, w.data());
        const int m = j + 1;
        const bool happy = b < 1e-14 * (1.0 + std::abs(a));

        // Check convergence on the projected exponential, every other
        // iteration once the subspace has a few vectors.
        if (happy || m >= 4 || m == m_max) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                t(i, i) = alpha[i];
                if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            Eigen::VectorXcd u = Eigen::VectorXcd::Zero(m);
            for (int i = 0; i < m; ++i) {
                const cplx phase = std::exp(cplx(0.0, -dt * es.eigenvalues()[i]));
                u += es.eigenvectors().col(i).cast<cplx>() *
                     (phase * es.eigenvectors()(0, i));
            }
            double err = b * std::abs(dt) * std::abs(u[m - 1]);
            if (u_prev.size() > 0) {
                Eigen::VectorXcd diff = u;
                diff.head(u_prev.size()) -= u_prev;
                err += diff.norm();
            }
            u_prev = u;
            if (happy || err <= tol) {
                // psi = beta0 * V u
                std::fill(psi.begin(), psi.end(), cplx(0.0));
                for (int i = 0; i < m; ++i) {
                    kernels::axpy(n, beta0 * u[i], basis[i].data(), psi.data());
                }
                return {m, err};
            }
        }
        if (m == m_max) {
            throw std::runtime_error(
                "Krylov step did not reach tol " + std::to_string(tol) + " with " +
                std::to_string(m_max) + " vectors (dt " + std::to_string(dt) + ")");
        }
        beta.push_back(b);
        basis.emplace_back(w);
        kernels::scal(n, 1.0 / b, basis.back().data());
    }
    throw std::logic_error("unreachable");
}

PropagateStats propagate(const SparseHermitianOperator& h, VecZ& psi,
                         double t_total, const PropagateOptions& opt,
                         const std::function<void(double, const VecZ&)>& observer,
                         int stride) {
    if (!(opt.tol >= 1e-12 && opt.tol <= 1e-6)) {
        throw std::invalid_argument("propagation tolerance must lie in [1e-12, 1e-6]");
    }
    if (opt.dt <= 0.0) throw std::invalid_argument("dt must be positive");

    PropagateStats stats;
    const double direction = t_total >= 0.0 ? 1.0 : -1.0;
    const double t_abs = std::abs(t_total);
    double t = 0.0;
    while (t < t_abs - 1e-12) {
        const double dt = std::min(opt.dt, t_abs - t);
        const StepResult step = lanczos_step(h, psi, direction * dt, opt.tol, opt.m_max);
        t += dt;
        stats.steps++;
        stats.max_krylov = std::max(stats.max_krylov, step.krylov_dim);
        stats.max_err_est = std::max(stats.max_err_est, step.err_est);
        if (observer && (stats.steps % stride == 0 || t >= t_abs - 1e-12)) {
            observer(direction * t, psi);
        }
    }
    return stats;
}

// --- channel analysis ----------------------------------------------------

ChannelClassifier ChannelClassifier::for_full_basis(const SectorBasis& basis,
                                                    const BoundPairSpec& bp) {
    const ModelParams& p = basis.params;
    ChannelClassifier c;
    const std::int64_t dim = basis.dim();
    c.cls_.assign(dim, Class::Broken);
    c.displacement_.assign(dim, 0.0f);
    c.particle_.assign(dim, -1.0f);
    c.at_edge_.assign(dim, 0);

    for (std::int64_t a = 0; a < dim; ++a) {
        int pair_site = -1, particle_site = -1;
        if (p.statistics == Statistics::Bose) {
            const auto occ = basis.unpack_bose(a);
            if (p.boundary == Boundary::Open && (occ[0] > 0 || occ[p.n_sites - 1] > 0)) {
                c.at_edge_[a] = 1;
            }
            if (bp.kind == EffectiveKind::NNBose) {
                // intact: three singly occupied sites, one isolated dimer
                std::vector<int> sites;
                bool multi = false;
                for (int j = 0; j < p.n_sites; ++j) {
                    if (occ[j] >= 2) multi = true;
                    if (occ[j] == 1) sites.push_back(j);
                }
                if (!multi && sites.size() == 3) {
                    const int s0 = sites[0], s1 = sites[1], s2 = sites[2];
                    if (s2 == s1 + 1 && s0 <= s1 - 2) {
                        pair_site = s1;
                        particle_site = s0;
                    } else if (s1 == s0 + 1 && s2 >= s1 + 2) {
                        pair_site = s0;
                        particle_site = s2;
                    }
                }
            } else {
                int doublon = -1, single = -1;
                bool clean = true;
                for (int j = 0; j < p.n_sites; ++j) {
                    if (occ[j] == 2) clean &= doublon < 0, doublon = j;
                    else if (occ[j] == 1) clean &= single < 0, single = j;
                    else if (occ[j] == 3) clean = false;
                }
                if (clean && doublon >= 0 && single >= 0) {
                    pair_site = doublon;
                    particle_site = single;
                }
            }
        } else {
            auto [up, down] = basis.unpack_fermi(a);
            if (p.boundary == Boundary::Open) {
                const std::uint64_t edges =
                    (std::uint64_t(1)) | (std::uint64_t(1) << (p.n_sites - 1));
                if ((up | down) & edges) c.at_edge_[a] = 1;
            }
            const std::uint64_t both = up & down;
            if (std::popcount(both) == 1) {
                pair_site = std::countr_zero(both);
                const std::uint64_t rest = (up | down) & ~both;
                if (std::popcount(rest) == 1) particle_site = std::countr_zero(rest);
            }
        }

        if (pair_site < 0 || particle_site < 0) continue;
        const double side = signed_distance(particle_site, pair_site, p);
        // NN kind: a particle adjacent to the dimer is outside the
        // scattering lattice and stays in the broken channel.
        c.cls_[a] = side < 0 ? Class::LeftIntact : Class::RightIntact;
        c.displacement_[a] = static_cast<float>(signed_distance(bp.position, pair_site, p));
        c.particle_[a] = static_cast<float>(particle_site);
    }
    return c;
}

ChannelClassifier ChannelClassifier::for_effective(const EffectiveSectorHamiltonian& h,
                                                   const BoundPairSpec& bp) {
    ChannelClassifier c;
    const std::int64_t dim = static_cast<std::int64_t>(h.configs.size());
    c.cls_.assign(dim, Class::Broken);
    c.displacement_.assign(dim, 0.0f);
    c.particle_.assign(dim, -1.0f);
    c.at_edge_.assign(dim, 0);
    const int last = h.n_sites - 1;
    for (std::int64_t a = 0; a < dim; ++a) {
        const auto [bpp, j] = h.configs[a];
        const int right = bp.kind == EffectiveKind::NNBose ? bpp + 1 : bpp;
        if (bp.kind == EffectiveKind::NNBose && (j == bpp - 1 || j == right + 1)) {
            // adjacent pocket, outside the scattering lattice
        } else {
            c.cls_[a] = j < bpp ? Class::LeftIntact : Class::RightIntact;
        }
        c.displacement_[a] = static_cast<float>(bp.position - bpp);
        c.particle_[a] = static_cast<float>(j);
        if (j == 0 || j == last || bpp == 0 || right == last) c.at_edge_[a] = 1;
    }
    return c;
}

ChannelClassifier ChannelClassifier::for_chain(int n_sites, int boundary_index,
                                               int shift_distance) {
    ChannelClassifier c;
    c.cls_.assign(n_sites, Class::LeftIntact);
    c.displacement_.assign(n_sites, 0.0f);
    c.particle_.assign(n_sites, 0.0f);
    c.at_edge_.assign(n_sites, 0);
    for (int x = 0; x < n_sites; ++x) {
        if (x >= boundary_index) {
            c.cls_[x] = Class::RightIntact;
            c.displacement_[x] = static_cast<float>(shift_distance);
        }
        c.particle_[x] = static_cast<float>(x);
    }
    c.at_edge_[0] = 1;
    c.at_edge_[n_sites - 1] = 1;
    return c;
}

ScatteringObservables ChannelClassifier::analyze(const VecZ& psi, double time,
                                                 bool after_arrival,
                                                 double energy) const {
    double left = 0.0, right = 0.0, broken = 0.0, shift_sum = 0.0;
    for (std::size_t a = 0; a < psi.size(); ++a) {
        const double w = std::norm(psi[a]);
        switch (cls_[a]) {
            case Class::LeftIntact: left += w; break;
            case Class::RightIntact:
                right += w;
                shift_sum += w * displacement_[a];
                break;
            case Class::Broken: broken += w; break;
        }
    }
    const double total = left + right + broken;
    ScatteringObservables obs;
    obs.time = time;
    obs.norm = std::sqrt(total);
    if (total > 0.0) {
        obs.p_incident = after_arrival ? 0.0 : left / total;
        obs.p_reflected = after_arrival ? left / total : 0.0;
        obs.p_shifted = right / total;
        obs.p_pair_broken = broken / total;
    }
    obs.shift_estimate = right > 0.0 ? shift_sum / right : 0.0;
    obs.energy = energy;
    return obs;
}

double ChannelClassifier::edge_occupancy(const VecZ& psi) const {
    double acc = 0.0;
    for (std::size_t a = 0; a < psi.size(); ++a) {
        if (at_edge_[a]) acc += std::norm(psi[a]);
    }
    return acc;
}

double ChannelClassifier::conditioned_particle_position(const VecZ& psi) const {
    double pos = 0.0, weight = 0.0;
    for (std::size_t a = 0; a < psi.size(); ++a) {
        if (cls_[a] == Class::Broken) continue;
        const double w = std::norm(psi[a]);
        pos += w * particle_[a];
        weight += w;
    }
    return weight > 0.0 ? pos / weight : 0.0;
}

ScatteringObservables analyze_channels(const VecZ& psi, const SectorBasis& basis,
                                       const BoundPairSpec& bp, double time,
                                       bool after_arrival, double energy) {
    return ChannelClassifier::for_full_basis(basis, bp)
        .analyze(psi, time, after_arrival, energy);
}

}  // namespace pairshift
