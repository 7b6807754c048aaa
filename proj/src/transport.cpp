#include "pairshift/transport.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace pairshift {

namespace {

constexpr double kPi = std::numbers::pi;

void check_momentum(double k) {
    if (!(k > 0.0 && k < kPi)) {
        throw std::domain_error("incident momentum must lie strictly inside (0, pi)");
    }
}

}  // namespace

void ImpurityChain::validate() const {
    if (!(lead_hopping < 0.0)) {
        throw std::invalid_argument("lead hopping must be negative (-kappa with kappa > 0)");
    }
    if (device_potentials.empty()) {
        if (!device_hoppings.empty()) {
            throw std::invalid_argument("a uniform chain has no device bonds");
        }
        return;
    }
    if (device_hoppings.size() != device_potentials.size() + 1) {
        throw std::invalid_argument("a device of n sites needs n+1 bonds");
    }
}

Eigen::MatrixXd ImpurityChain::finite_matrix(int left_len, int right_len) const {
    validate();
    const int n = device_size();
    const int total = left_len + n + right_len;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(total, total);
    auto bond = [&](int site) {
        // bond between site and site+1
        if (n == 0 || site < left_len - 1 || site >= left_len + n) return lead_hopping;
        return device_hoppings[site - (left_len - 1)];
    };
    for (int s = 0; s + 1 < total; ++s) h(s, s + 1) = h(s + 1, s) = bond(s);
    for (int d = 0; d < n; ++d) h(left_len + d, left_len + d) = device_potentials[d];
    return h;
}

TransmissionResult negf_transmission(const ImpurityChain& chain, double k) {
    chain.validate();
    check_momentum(k);

    const double kappa = -chain.lead_hopping;
    const double energy = -2.0 * kappa * std::cos(k);

    TransmissionResult res;
    res.k = k;
    res.energy = energy;

    const int n = chain.device_size();
    if (n == 0) {
        res.T = 1.0;
        res.R = 0.0;
        return res;
    }

    Eigen::MatrixXcd hc = Eigen::MatrixXcd::Zero(n, n);
    for (int d = 0; d < n; ++d) hc(d, d) = chain.device_potentials[d];
    for (int d = 0; d + 1 < n; ++d) {
        hc(d, d + 1) = hc(d + 1, d) = chain.device_hoppings[d + 1];
    }

    // Surface Green's function of a semi-infinite lead with hopping -kappa at
    // E = -2 kappa cos k, folded through the contact bond.
    const cplx g_surf = -std::exp(cplx(0.0, k)) / kappa;
    const double tau_in = chain.device_hoppings.front();
    const double tau_out = chain.device_hoppings.back();
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(n, n);
    sigma(0, 0) += tau_in * tau_in * g_surf;
    sigma(n - 1, n - 1) += tau_out * tau_out * g_surf;

    const Eigen::MatrixXcd a =
        energy * Eigen::MatrixXcd::Identity(n, n) - hc - sigma;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const Eigen::MatrixXcd g = lu.solve(Eigen::MatrixXcd::Identity(n, n));

    // Gamma = i (Sigma - Sigma^+); numerically equal to 2 kappa sin k on the
    // contact entries for tau = -kappa.
    Eigen::MatrixXcd gamma1 = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd gamma2 = Eigen::MatrixXcd::Zero(n, n);
    gamma1(0, 0) = cplx(0.0, 1.0) * (tau_in * tau_in * (g_surf - std::conj(g_surf)));
    gamma2(n - 1, n - 1) = cplx(0.0, 1.0) * (tau_out * tau_out * (g_surf - std::conj(g_surf)));

    const cplx trace = (gamma1 * g * gamma2 * g.adjoint()).trace();
    res.T = trace.real();
    res.R = 1.0 - res.T;
    return res;
}

double analytic_T12(double kappa, double v, double k) {
    if (kappa == 0.0) throw std::invalid_argument("kappa must be nonzero");
    const double s = std::sin(k);
    const double c = std::cos(k);
    double den = 1.0;
    for (double l : {-1.0, 1.0}) {
        const double w = v / kappa + l;
        den *= 4.0 * w * w + 4.0 * w * c + 1.0;
    }
    if (!(den > 0.0)) throw std::runtime_error("transmission denominator is not positive");
    return 16.0 * s * s / den;
}

std::pair<double, double> resonance_V(double kappa, double k) {
    if (kappa == 0.0) throw std::invalid_argument("kappa must be nonzero");
    const double c = std::cos(k);
    const double root = std::sqrt(c * c + 3.0);
    return {0.5 * kappa * (-c + root), 0.5 * kappa * (-c - root)};
}

TransmissionResult planewave_scattering(const ImpurityChain& chain, double k) {
    chain.validate();
    check_momentum(k);

    const double kappa = -chain.lead_hopping;
    const double energy = -2.0 * kappa * std::cos(k);

    TransmissionResult res;
    res.k = k;
    res.energy = energy;

    const int n = chain.device_size();
    if (n == 0) {
        res.r_amp = cplx(0.0, 0.0);
        res.t_amp = cplx(1.0, 0.0);
        res.T = 1.0;
        res.R = 0.0;
        return res;
    }

    // Unknowns u = (r, psi_0 .. psi_{n-1}, t); matching conditions at the
    // lead sites -1 and n and at every device site.  psi_l = e^{ikl} +
    // r e^{-ikl} for l <= -1 and psi_l = t e^{ikl} for l >= n; the incident
    // plane-wave pieces go to the right-hand side.
    const int dim = n + 2;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim);
    const cplx I(0.0, 1.0);
    auto in_wave = [&](int l) { return std::exp(I * (k * l)); };
    auto r_wave = [&](int l) { return std::exp(-I * (k * l)); };
    const double t_lead = chain.lead_hopping;
    auto hop = [&](int bond) { return chain.device_hoppings[bond]; };

    // site -1:  E psi_-1 = t_lead psi_-2 + hop(0) psi_0
    a(0, 0) = energy * r_wave(-1) - t_lead * r_wave(-2);
    a(0, 1) = -hop(0);
    b(0) = -energy * in_wave(-1) + t_lead * in_wave(-2);

    // device sites
    for (int x = 0; x < n; ++x) {
        const int row = x + 1;
        a(row, x + 1) = energy - chain.device_potentials[x];
        if (x == 0) {
            a(row, 0) += -hop(0) * r_wave(-1);
            b(row) += hop(0) * in_wave(-1);
        } else {
            a(row, x) = -hop(x);
        }
        if (x == n - 1) {
            a(row, n + 1) += -hop(n) * in_wave(n);
        } else {
            a(row, x + 2) = -hop(x + 1);
        }
    }

    // site n:  E psi_n = hop(n) psi_{n-1} + t_lead psi_{n+1}
    a(n + 1, n) = -hop(n);
    a(n + 1, n + 1) = energy * in_wave(n) - t_lead * in_wave(n + 1);

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const Eigen::VectorXcd u = lu.solve(b);
    const double residual = (a * u - b).norm();
    if (!std::isfinite(residual) || residual > 1e-8 * (1.0 + b.norm())) {
        throw std::runtime_error("plane-wave matching system is singular");
    }

    res.r_amp = u(0);
    res.t_amp = u(n + 1);
    res.R = std::norm(u(0));
    res.T = std::norm(u(n + 1));
    return res;
}

}  // namespace pairshift
