#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pairshift/model.hpp"

// Single-particle transmission through an impurity chain by three
// independent routes: Green's-function trace, plane-wave matching, and the
// closed-form expression for the two-site impurity, plus the resonance
// coupling at which the impurity transmits perfectly.

namespace pairshift {

// One-dimensional chain: uniform semi-infinite leads with hopping
// lead_hopping (= -kappa) on both sides of a device window.  A device of n
// sites carries n on-site potentials and n+1 bond hoppings (entry bond,
// internal bonds, exit bond).  n = 0 means a uniform chain.  shift_distance
// records the bound-pair displacement a transmission event corresponds to.
struct ImpurityChain {
    double lead_hopping = -1.0;
    std::vector<double> device_potentials;
    std::vector<double> device_hoppings;
    int shift_distance = 1;

    int device_size() const { return static_cast<int>(device_potentials.size()); }
    void validate() const;

    // Finite chain of left_len + device + right_len sites, for spectral
    // comparisons against the effective two-body sector.
    Eigen::MatrixXd finite_matrix(int left_len, int right_len) const;
};

struct TransmissionResult {
    double k = 0.0;
    double energy = 0.0;  // E = -2 kappa cos k
    std::optional<cplx> r_amp;  // produced by the plane-wave route only
    std::optional<cplx> t_amp;
    double T = 0.0;
    double R = 0.0;
};

// Retarded-Green's-function transmission: G = (E - H_c - Sigma)^-1 with the
// lead self-energy -kappa e^{ik} on the contact sites and
// T = Tr[Gamma_1 G Gamma_2 G^+], Gamma = i(Sigma - Sigma^+).
TransmissionResult negf_transmission(const ImpurityChain& chain, double k);

// Closed form for the two-site impurity (potentials 2V, internal bond
// -2 kappa): T = 16 sin^2 k / prod_{l=+-1}[4(V/k+l)^2 + 4(V/k+l)cos k + 1].
double analytic_T12(double kappa, double v, double k);

// Both roots of the perfect-transmission condition,
// V_R = (kappa/2)(-cos k +- sqrt(cos^2 k + 3)), positive root first.
std::pair<double, double> resonance_V(double kappa, double k);

// Scattering-ansatz matching: incident e^{ikl} + r e^{-ikl} on the left
// lead, t e^{ikl} on the right, solved across the device window.
TransmissionResult planewave_scattering(const ImpurityChain& chain, double k);

}  // namespace pairshift
