#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pairshift/dynamics.hpp"

// Scattering experiments end to end: geometry placement, state
// preparation, propagation with sampling, channel time series, validity
// flags, and the comparison values from the closed-form transmission.

namespace pairshift {

enum class RunModel { FullModel, EffectiveModel, ChainModel };

struct ExperimentConfig {
    EffectiveKind kind = EffectiveKind::OnsiteBose;
    RunModel model = RunModel::FullModel;

    double kappa = 1.0;
    double u = 100.0;
    double v = 0.0;
    int n_sites = 61;
    Boundary boundary = Boundary::Open;

    double k0 = 1.5707963267948966;
    double sigma = 8.0;
    int center = -1;       // -1: placed automatically
    int bp_position = -1;  // -1: placed automatically
    Preparation preparation = Preparation::Bare;
    bool spin_down_incident = false;  // Fermi full model: (1,2) sector

    double dt = 0.05;
    double tol = 1e-9;
    double t_total = 0.0;  // 0: stop from geometry (bounce-aware midpoint)
    double support_radius_sigmas = 4.0;
    int taper_sites = -1;  // -1: max(3, sigma/2)
    double edge_threshold = 1e-6;
    int sample_stride = 5;

    std::string out_csv;   // time series; empty = not written
    std::string out_json;  // summary; empty = not written

    void validate() const;
    // Fills center / bp_position / t_total when left automatic.
    void resolve_geometry();
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<ScatteringObservables> series;
    ScatteringObservables final_obs;
    double analytic_T_at_k0 = 0.0;
    double analytic_T_weighted = 0.0;
    double mean_packet_momentum = 0.0;
    double max_edge_occupancy = 0.0;
    bool valid = true;
    int steps = 0;
    int max_krylov = 0;
    std::string simd;
};

ExperimentSummary run_experiment(const ExperimentConfig& config);

// Columns: time, p_incident, p_reflected, p_shifted, p_pair_broken, norm,
// energy, shift_estimate.
void write_series_csv(const std::vector<ScatteringObservables>& series,
                      std::ostream& os);

std::string summary_to_json(const ExperimentSummary& summary);

// Strict JSON parsing: unknown or ill-typed fields throw
// std::invalid_argument naming the field.
ExperimentConfig config_from_json(const std::string& text);

const char* to_string(EffectiveKind kind);
const char* to_string(RunModel model);

}  // namespace pairshift
