#pragma once

#include <functional>
#include <vector>

#include "pairshift/effective.hpp"
#include "pairshift/model.hpp"

// Exact wavepacket scattering: prepare a Gaussian single-particle packet
// incident on a stationary bound pair, evolve under the full (or effective)
// Hamiltonian with a Krylov propagator, and resolve the state into
// incident / reflected / shifted / pair-broken channels.

namespace pairshift {

struct WavepacketSpec {
    double k0 = 1.5707963267948966;  // central momentum
    double sigma = 8.0;              // spatial width (sites)
    int center = 0;                  // launch site
};

enum class Preparation { Bare, Dressed };

struct BoundPairSpec {
    EffectiveKind kind = EffectiveKind::OnsiteBose;
    int position = 0;  // pair site; NN kind: left site of the dimer
    Preparation preparation = Preparation::Bare;
};

// Envelope window.  The Gaussian is restricted to [lo, hi] and brought to
// zero over `taper` sites at each end with a sin^2 ramp, so the state
// carries no amplitude at the chain edges or on the pair at t = 0.
struct PacketWindow {
    int lo = 0;
    int hi = 0;
    int taper = 4;
};

// Default window: 4 sigma around the center, clipped to the chain and to
// the incident side of the pair.
PacketWindow default_window(const ModelParams& params, const WavepacketSpec& wp,
                            const BoundPairSpec& bp, double radius_sigmas = 4.0,
                            int taper = -1);

// Complex envelope amplitudes g_j e^{i k0 j} over the chain (unnormalized,
// zero outside the window).
VecZ packet_envelope(const ModelParams& params, const WavepacketSpec& wp,
                     const PacketWindow& window);

// Mean momentum of a single-particle amplitude vector on the chain's
// discrete Fourier grid, folded to (-pi, pi].
double mean_momentum(const VecZ& amplitudes);

// Momentum distribution |c_k|^2 on the DFT grid; returns (k, weight) pairs.
std::vector<std::pair<double, double>> momentum_distribution(const VecZ& amplitudes);

// Unit-norm scattering state: packet on the single particle, pair created
// at its site (Bare) or projected onto the two-particle bound subspace
// (Dressed).  The basis must be the matching 3-boson or (2,1)/(1,2)
// fermion sector; a window overlapping the pair is rejected.
VecZ prepare_scattering_state(const SectorBasis& basis, const WavepacketSpec& wp,
                              const BoundPairSpec& bp, const PacketWindow& window);

// --- propagation -------------------------------------------------------

struct PropagateOptions {
    double dt = 0.05;     // step, units 1/kappa
    double tol = 1e-9;    // per-step local error budget
    int m_max = 64;       // Krylov dimension cap
};

struct StepResult {
    int krylov_dim = 0;
    double err_est = 0.0;
};

// One step psi <- exp(-i dt H) psi with a Lanczos approximation (full
// reorthogonalization).  Throws std::runtime_error with diagnostics when
// the error estimate cannot be brought under tol within m_max vectors.
StepResult lanczos_step(const SparseHermitianOperator& h, VecZ& psi, double dt,
                        double tol, int m_max);

struct PropagateStats {
    int steps = 0;
    int max_krylov = 0;
    double max_err_est = 0.0;
};

// Evolve psi over t_total (negative evolves backward).  The observer, when
// given, is called after every `stride` steps and at the final time.
PropagateStats propagate(const SparseHermitianOperator& h, VecZ& psi,
                         double t_total, const PropagateOptions& opt,
                         const std::function<void(double, const VecZ&)>& observer = {},
                         int stride = 1);

// --- channel analysis ---------------------------------------------------

struct ScatteringObservables {
    double time = 0.0;
    double p_incident = 0.0;
    double p_reflected = 0.0;
    double p_shifted = 0.0;
    double p_pair_broken = 0.0;
    double shift_estimate = 0.0;  // mean pair displacement over the shifted channel
    double norm = 0.0;
    double energy = 0.0;
};

// Precomputed per-configuration classification.  A configuration is intact
// when the pair footprint is unambiguous (double occupancy for the on-site
// kinds, an isolated adjacent dimer for the NN kind); intact configurations
// split by the particle's side of the pair, everything else is the
// pair-broken channel.  Side and displacement use signed distances, ring
// aware on periodic chains.
class ChannelClassifier {
public:
    enum class Class : std::uint8_t { LeftIntact, RightIntact, Broken };

    static ChannelClassifier for_full_basis(const SectorBasis& basis,
                                            const BoundPairSpec& bp);
    static ChannelClassifier for_effective(const EffectiveSectorHamiltonian& h,
                                           const BoundPairSpec& bp);
    // Single-particle chain in scattering coordinates: sites at or past
    // boundary_index count as transmitted with the given shift distance.
    static ChannelClassifier for_chain(int n_sites, int boundary_index,
                                       int shift_distance);

    // Probabilities are fractions of |psi|^2, so they always sum to one;
    // the norm itself is reported separately.  Before the packet reaches
    // the pair the left-intact weight reports as p_incident, after as
    // p_reflected.
    ScatteringObservables analyze(const VecZ& psi, double time, bool after_arrival,
                                  double energy) const;

    // Occupancy-weighted probability of any particle on an edge site.
    double edge_occupancy(const VecZ& psi) const;

    // Mean particle position over intact configurations (stopping rule).
    double conditioned_particle_position(const VecZ& psi) const;

private:
    std::vector<Class> cls_;
    std::vector<float> displacement_;
    std::vector<float> particle_;
    std::vector<std::uint8_t> at_edge_;
};

// One-shot wrapper over ChannelClassifier::analyze for a full-sector state.
ScatteringObservables analyze_channels(const VecZ& psi, const SectorBasis& basis,
                                       const BoundPairSpec& bp,
                                       double time = 0.0, bool after_arrival = false,
                                       double energy = 0.0);

}  // namespace pairshift
