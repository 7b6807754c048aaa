#include "pairshift/effective.hpp"

#include <stdexcept>

namespace pairshift {

std::int64_t EffectiveSectorHamiltonian::index_of(int bp_pos, int particle_pos) const {
    if (bp_pos < 0 || particle_pos < 0 || bp_pos >= n_sites || particle_pos >= n_sites) {
        return -1;
    }
    return lookup_[static_cast<std::size_t>(bp_pos) * n_sites + particle_pos];
}

EffectiveSectorHamiltonian build_effective_sector_hamiltonian(
    const ModelParams& params, EffectiveKind kind, int n_sites, TermSet terms) {
    if (params.kappa == 0.0) throw std::invalid_argument("kappa must be nonzero");
    if (params.boundary != Boundary::Open) {
        throw std::invalid_argument("effective sector Hamiltonians are built on open chains");
    }
    const int min_sites = kind == EffectiveKind::NNBose ? 4 : 3;
    if (n_sites < min_sites) {
        throw std::invalid_argument("chain too small to host one pair and one particle");
    }
    if (terms == TermSet::Full) {
        if (kind != EffectiveKind::NNBose && params.u == 0.0) {
            throw std::invalid_argument("on-site pair model needs u != 0");
        }
        if (kind == EffectiveKind::NNBose && (params.v == 0.0 || params.v == params.u)) {
            throw std::invalid_argument("NN pair model needs v != 0 and v != u");
        }
    }

    EffectiveSectorHamiltonian h;
    h.kind = kind;
    h.terms = terms;
    h.params = params;
    h.n_sites = n_sites;

    const bool nn = kind == EffectiveKind::NNBose;
    const int pair_width = nn ? 2 : 1;
    auto blocked = [&](int bp, int j) { return j >= bp && j < bp + pair_width; };

    h.lookup_.assign(static_cast<std::size_t>(n_sites) * n_sites, -1);
    for (int bp = 0; bp + pair_width <= n_sites; ++bp) {
        for (int j = 0; j < n_sites; ++j) {
            if (blocked(bp, j)) continue;
            h.lookup_[static_cast<std::size_t>(bp) * n_sites + j] =
                static_cast<std::int64_t>(h.configs.size());
            h.configs.push_back({bp, j});
        }
    }

    const double kappa = params.kappa;
    const double u = params.u;
    const double v = params.v;

    double swap_amp = 0.0, pair_hop = 0.0, density = 0.0;
    switch (kind) {
        case EffectiveKind::OnsiteBose:
            swap_amp = -2.0 * kappa;
            pair_hop = 2.0 * kappa * kappa / u;
            density = 2.0 * v - 3.5 * kappa * kappa / u;
            h.constant_offset = u + 4.0 * kappa * kappa / u;
            break;
        case EffectiveKind::FermiSinglet:
            swap_amp = -kappa;
            pair_hop = 2.0 * kappa * kappa / u;
            density = -2.0 * kappa * kappa / u;
            h.constant_offset = u + 4.0 * kappa * kappa / u;
            break;
        case EffectiveKind::NNBose:
            swap_amp = -kappa;
            pair_hop = kappa * kappa / v + 2.0 * kappa * kappa / (v - u);
            density = -2.0 * kappa * kappa / v;
            h.constant_offset = v + 2.0 * kappa * kappa / v + 4.0 * kappa * kappa / (v - u);
            break;
    }
    if (terms == TermSet::LeadingOrder) {
        pair_hop = 0.0;
        density = kind == EffectiveKind::OnsiteBose ? 2.0 * v : 0.0;
        h.constant_offset = kind == EffectiveKind::NNBose ? v : u;
    }

    std::vector<std::int64_t> rows, cols;
    std::vector<double> vals;
    auto add = [&](std::int64_t a, std::int64_t b, double val) {
        if (a <= b) {
            rows.push_back(a); cols.push_back(b); vals.push_back(val);
        }
    };

    for (std::int64_t a = 0; a < static_cast<std::int64_t>(h.configs.size()); ++a) {
        const auto [bp, j] = h.configs[a];

        double diag = h.constant_offset;
        if (nn) {
            if (density != 0.0 && (j == bp - 2 || j == bp + 3)) diag += density;
        } else {
            if (density != 0.0 && (j == bp - 1 || j == bp + 1)) diag += density;
        }
        add(a, a, diag);

        // particle hopping, blocked on the pair's footprint
        for (int dj : {-1, 1}) {
            const std::int64_t b = h.index_of(bp, j + dj);
            if (b >= 0 && b > a) add(a, b, -kappa);
        }

        // pair self-hopping
        if (pair_hop != 0.0) {
            for (int db : {-1, 1}) {
                const std::int64_t b = h.index_of(bp + db, j);
                if (b >= 0 && b > a) add(a, b, pair_hop);
            }
        }

        // swap
        if (nn) {
            // (bp = i+2, j = i) <-> (bp = i, j = i+3)
            if (j == bp - 2) {
                const std::int64_t b = h.index_of(j, j + 3);
                if (b >= 0 && b > a) add(a, b, swap_amp);
            }
            if (j == bp + 3) {
                const std::int64_t b = h.index_of(bp + 2, bp);
                if (b >= 0 && b > a) add(a, b, swap_amp);
            }
        } else {
            // (bp = i, j = i+1) <-> (bp = i+1, j = i)
            if (j == bp + 1) {
                const std::int64_t b = h.index_of(bp + 1, bp);
                if (b >= 0 && b > a) add(a, b, swap_amp);
            }
            if (j == bp - 1) {
                const std::int64_t b = h.index_of(bp - 1, bp);
                if (b >= 0 && b > a) add(a, b, swap_amp);
            }
        }
    }

    h.op = assemble_operator(static_cast<std::int64_t>(h.configs.size()),
                             std::move(rows), std::move(cols), std::move(vals));
    return h;
}

ImpurityChain reduce_to_impurity_chain(const ModelParams& params, EffectiveKind kind) {
    if (params.kappa == 0.0) throw std::invalid_argument("kappa must be nonzero");
    ImpurityChain chain;
    chain.lead_hopping = -params.kappa;
    switch (kind) {
        case EffectiveKind::OnsiteBose:
            chain.device_potentials = {2.0 * params.v, 2.0 * params.v};
            chain.device_hoppings = {-params.kappa, -2.0 * params.kappa, -params.kappa};
            chain.shift_distance = 1;
            break;
        case EffectiveKind::NNBose:
            chain.shift_distance = 2;
            break;
        case EffectiveKind::FermiSinglet:
            chain.shift_distance = 1;
            break;
    }
    return chain;
}

ChannelLabel map_configuration(EffectiveKind kind, int bp_origin, int bp_pos,
                               int particle_pos) {
    if (kind == EffectiveKind::NNBose) {
        if (bp_pos == bp_origin && particle_pos <= bp_origin - 2) {
            return {ChannelSide::IncidentSide, particle_pos - (bp_origin - 2)};
        }
        if (bp_pos == bp_origin - 2 && particle_pos >= bp_origin + 1) {
            return {ChannelSide::ShiftedSide, particle_pos - bp_origin};
        }
        return {ChannelSide::PairBroken, 0};
    }
    if (bp_pos == bp_origin && particle_pos < bp_origin) {
        return {ChannelSide::IncidentSide, particle_pos - bp_origin};
    }
    if (bp_pos == bp_origin - 1 && particle_pos >= bp_origin) {
        return {ChannelSide::ShiftedSide, particle_pos - bp_origin};
    }
    return {ChannelSide::PairBroken, 0};
}

}  // namespace pairshift
