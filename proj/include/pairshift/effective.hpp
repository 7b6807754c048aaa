#pragma once

#include <vector>

#include "pairshift/model.hpp"
#include "pairshift/transport.hpp"

// Effective one-pair + one-particle models: a hardcore composite pair that
// swaps with a single particle, the reduction of each scattering problem to
// an equivalent single-particle impurity chain, and the map from sector
// configurations to the scattering-basis labels.

namespace pairshift {

enum class EffectiveKind { OnsiteBose, NNBose, FermiSinglet };

// Full keeps every term of the effective model (pair self-hopping and the
// kappa^2-scale density terms included); LeadingOrder keeps only the
// particle hopping, the swap, the first-order density term and the pair
// rest energy, which is the part the impurity-chain reduction retains.
enum class TermSet { Full, LeadingOrder };

struct EffectiveConfig {
    int bp_pos = 0;        // on-site kinds: pair site; NN kind: left dimer site
    int particle_pos = 0;  // single-particle site
};

struct EffectiveSectorHamiltonian {
    EffectiveKind kind = EffectiveKind::OnsiteBose;
    TermSet terms = TermSet::Full;
    ModelParams params;
    int n_sites = 0;
    std::vector<EffectiveConfig> configs;  // bp-major, particle ascending
    SparseHermitianOperator op;            // includes constant_offset on the diagonal
    double constant_offset = 0.0;          // pair rest energy

    std::int64_t index_of(int bp_pos, int particle_pos) const;  // -1 if absent

private:
    friend EffectiveSectorHamiltonian build_effective_sector_hamiltonian(
        const ModelParams&, EffectiveKind, int, TermSet);
    std::vector<std::int64_t> lookup_;  // bp * n_sites + particle -> index
};

// Open-chain sector with one pair and one particle.  The hardcore algebra
// excludes the particle from the pair's site(s); no other exclusions are
// imposed.  Swap elements: -2 kappa (OnsiteBose), -kappa (FermiSinglet),
// -kappa with a 3-site particle jump and a 2-site pair jump (NNBose).
EffectiveSectorHamiltonian build_effective_sector_hamiltonian(
    const ModelParams& params, EffectiveKind kind, int n_sites,
    TermSet terms = TermSet::Full);

// Leading-order single-particle picture of the scattering problem:
// OnsiteBose gives a two-site device (potentials 2V, internal bond
// -2 kappa) and shift distance 1; NNBose and FermiSinglet give uniform
// chains with shift distances 2 and 1.
ImpurityChain reduce_to_impurity_chain(const ModelParams& params,
                                       EffectiveKind kind);

enum class ChannelSide { IncidentSide, ShiftedSide, PairBroken };

struct ChannelLabel {
    ChannelSide side = ChannelSide::PairBroken;
    long l = 0;  // scattering-basis index; meaningful unless PairBroken
};

// Piecewise scattering-basis label of a configuration, relative to the
// pair's original position bp_origin.  Configurations outside the
// scattering lattice map to PairBroken.
ChannelLabel map_configuration(EffectiveKind kind, int bp_origin, int bp_pos,
                               int particle_pos);

}  // namespace pairshift
