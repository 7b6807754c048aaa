// Command-line front end: bound-state branches, transmission sweeps,
// resonance couplings, and full scattering experiments, with CSV/JSON
// output.  Exit codes: 0 success, 2 configuration error, 3 I/O error,
// 4 run flagged invalid (boundary contamination).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairshift/dynamics.hpp"
#include "pairshift/effective.hpp"
#include "pairshift/experiment.hpp"
#include "pairshift/spectrum.hpp"
#include "pairshift/transport.hpp"

namespace {

using namespace pairshift;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvalidRun = 4;

std::vector<double> parse_grid(const std::string& spec) {
    // "start:stop:count" (inclusive linspace) or a single value
    const auto c1 = spec.find(':');
    if (c1 == std::string::npos) return {std::stod(spec)};
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) {
        throw std::invalid_argument("grid must be start:stop:count");
    }
    const double start = std::stod(spec.substr(0, c1));
    const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const int count = std::stoi(spec.substr(c2 + 1));
    if (count < 1) throw std::invalid_argument("grid count must be >= 1");
    std::vector<double> grid;
    for (int i = 0; i < count; ++i) {
        grid.push_back(count == 1 ? start
                                  : start + (stop - start) * i / (count - 1));
    }
    return grid;
}

EffectiveKind parse_kind(const std::string& s) {
    if (s == "onsite-bose") return EffectiveKind::OnsiteBose;
    if (s == "nn-bose") return EffectiveKind::NNBose;
    if (s == "fermi-singlet") return EffectiveKind::FermiSinglet;
    throw std::invalid_argument("kind must be onsite-bose, nn-bose or fermi-singlet");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open " + path);
    return os;
}

int cmd_spectrum(const std::string& branch_name, double kappa, double u, double v,
                 const std::string& k_grid_spec, int n0, const std::string& out) {
    BranchType type;
    if (branch_name == "onsite") type = BranchType::OnSite;
    else if (branch_name == "nn") type = BranchType::NearestNeighbor;
    else if (branch_name == "bonding") type = BranchType::Bonding;
    else if (branch_name == "antibonding") type = BranchType::AntiBonding;
    else throw std::invalid_argument("branch must be onsite, nn, bonding or antibonding");

    ModelParams params;
    params.kappa = kappa;
    params.u = u;
    params.v = v;
    params.n_sites = 2 * n0 + 1 > 64 ? 64 : 2 * n0 + 1;
    params.boundary = Boundary::Open;

    const std::vector<double> grid = parse_grid(k_grid_spec);
    const BoundStateBranch branch = extract_branch(params, type, grid, n0);
    if (out.empty()) {
        write_branch_csv(branch, std::cout);
    } else {
        auto os = open_output(out);
        write_branch_csv(branch, os);
        if (!os) throw std::ios_base::failure("failed writing " + out);
    }
    return kExitOk;
}

int cmd_transmission(const std::string& kind_name, double kappa, double v,
                     const std::string& k_grid_spec, const std::string& v_grid_spec,
                     const std::string& out) {
    const EffectiveKind kind = parse_kind(kind_name);
    const std::vector<double> k_grid = parse_grid(k_grid_spec);
    const std::vector<double> v_grid =
        v_grid_spec.empty() ? std::vector<double>{v} : parse_grid(v_grid_spec);

    std::ostringstream body;
    body << "k,V,T_analytic,T_negf,T_planewave,V_R_plus,V_R_minus\n";
    char buf[320];
    for (double vv : v_grid) {
        ModelParams params;
        params.kappa = kappa;
        params.v = vv;
        params.u = 1.0;  // not used by the reduction coefficients below
        params.n_sites = 8;
        const ImpurityChain chain = reduce_to_impurity_chain(params, kind);
        for (double k : k_grid) {
            const double t_analytic = kind == EffectiveKind::OnsiteBose
                                          ? analytic_T12(kappa, vv, k)
                                          : 1.0;
            const double t_negf = negf_transmission(chain, k).T;
            const double t_pw = planewave_scattering(chain, k).T;
            const auto [vp, vm] = resonance_V(kappa, k);
            std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n",
                          k, vv, t_analytic, t_negf, t_pw, vp, vm);
            body << buf;
        }
    }
    if (out.empty()) {
        std::cout << body.str();
    } else {
        auto os = open_output(out);
        os << body.str();
        if (!os) throw std::ios_base::failure("failed writing " + out);
    }
    return kExitOk;
}

int cmd_resonance(double kappa, double k, const std::string& k_grid_spec,
                  bool as_json, const std::string& out) {
    std::ostringstream body;
    if (!k_grid_spec.empty()) {
        body << "k,v_plus,v_minus\n";
        char buf[160];
        for (double kk : parse_grid(k_grid_spec)) {
            const auto [vp, vm] = resonance_V(kappa, kk);
            std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%.15g\n", kk, vp, vm);
            body << buf;
        }
    } else {
        const auto [vp, vm] = resonance_V(kappa, k);
        if (as_json) {
            nlohmann::ordered_json j;
            j["v_plus"] = vp;
            j["v_minus"] = vm;
            body << j.dump() << "\n";
        } else {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%.15g %.15g\n", vp, vm);
            body << buf;
        }
    }
    if (out.empty()) {
        std::cout << body.str();
    } else {
        auto os = open_output(out);
        os << body.str();
        if (!os) throw std::ios_base::failure("failed writing " + out);
    }
    return kExitOk;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::ios_base::failure("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_json(ss.str());
}

int cmd_scatter(const std::string& config_path) {
    const ExperimentConfig config = load_config(config_path);
    config.validate();
    const ExperimentSummary summary = run_experiment(config);
    if (config.out_json.empty()) std::cout << summary_to_json(summary) << "\n";
    if (!summary.valid) {
        std::cerr << "run flagged invalid: edge occupancy "
                  << summary.max_edge_occupancy << " exceeds threshold "
                  << config.edge_threshold << "\n";
        return kExitInvalidRun;
    }
    return kExitOk;
}

int cmd_compare_effective(const std::string& config_path, const std::string& out) {
    ExperimentConfig config = load_config(config_path);
    config.validate();

    nlohmann::ordered_json j;
    double p_full = 0.0;
    for (RunModel model : {RunModel::FullModel, RunModel::EffectiveModel, RunModel::ChainModel}) {
        ExperimentConfig c = config;
        c.model = model;
        c.out_csv.clear();
        c.out_json.clear();
        const ExperimentSummary s = run_experiment(c);
        nlohmann::ordered_json entry;
        entry["p_shifted"] = s.final_obs.p_shifted;
        entry["p_reflected"] = s.final_obs.p_reflected;
        entry["p_pair_broken"] = s.final_obs.p_pair_broken;
        entry["shift_estimate"] = s.final_obs.shift_estimate;
        entry["valid"] = s.valid;
        j[to_string(model)] = entry;
        if (model == RunModel::FullModel) {
            p_full = s.final_obs.p_shifted;
            j["analytic_T12_at_k0"] = s.analytic_T_at_k0;
            j["analytic_T12_weighted"] = s.analytic_T_weighted;
        }
    }
    j["full_minus_effective"] =
        p_full - j["effective"]["p_shifted"].get<double>();
    j["full_minus_weighted"] = p_full - j["analytic_T12_weighted"].get<double>();

    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        auto os = open_output(out);
        os << j.dump(2) << "\n";
        if (!os) throw std::ios_base::failure("failed writing " + out);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bound-pair scattering simulator"};
    app.require_subcommand(1);

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "bound-state branch over a momentum grid");
    std::string sp_branch = "onsite", sp_kgrid = "0:3.141592653589793:101", sp_out;
    double sp_kappa = 1.0, sp_u = 20.0, sp_v = 0.0;
    int sp_n0 = 200;
    sp->add_option("--branch", sp_branch, "onsite|nn|bonding|antibonding");
    sp->add_option("--kappa", sp_kappa);
    sp->add_option("--u", sp_u);
    sp->add_option("--v", sp_v);
    sp->add_option("--k-grid", sp_kgrid, "start:stop:count");
    sp->add_option("--n0", sp_n0, "relative-coordinate cutoff");
    sp->add_option("--out", sp_out, "CSV path (default stdout)");

    // transmission
    auto* tr = app.add_subcommand("transmission", "three-route transmission over grids");
    std::string tr_kind = "onsite-bose", tr_kgrid = "0.05:3.09:100", tr_vgrid, tr_out;
    double tr_kappa = 1.0, tr_v = 0.0;
    tr->add_option("--kind", tr_kind, "onsite-bose|nn-bose|fermi-singlet");
    tr->add_option("--kappa", tr_kappa);
    tr->add_option("--v", tr_v, "NN coupling (onsite-bose chains)");
    tr->add_option("--k-grid", tr_kgrid, "start:stop:count");
    tr->add_option("--v-grid", tr_vgrid, "optional V grid start:stop:count");
    tr->add_option("--out", tr_out, "CSV path (default stdout)");

    // resonance
    auto* rs = app.add_subcommand("resonance", "perfect-transmission coupling V_R");
    std::string rs_kgrid, rs_out;
    double rs_kappa = 1.0, rs_k = 1.5707963267948966;
    bool rs_json = false;
    rs->add_option("--kappa", rs_kappa);
    rs->add_option("--k", rs_k, "incident momentum");
    rs->add_option("--k-grid", rs_kgrid, "emit CSV over a grid instead");
    rs->add_flag("--json", rs_json, "emit a JSON object");
    rs->add_option("--out", rs_out, "output path (default stdout)");

    // scatter
    auto* sc = app.add_subcommand("scatter", "wavepacket scattering experiment");
    std::string sc_config;
    sc->add_option("--config", sc_config, "experiment JSON")->required();

    // compare-effective
    auto* ce = app.add_subcommand("compare-effective",
                                  "full vs effective vs chain vs closed form");
    std::string ce_config, ce_out;
    ce->add_option("--config", ce_config, "experiment JSON")->required();
    ce->add_option("--out", ce_out, "JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sp->parsed()) return cmd_spectrum(sp_branch, sp_kappa, sp_u, sp_v, sp_kgrid, sp_n0, sp_out);
        if (tr->parsed()) return cmd_transmission(tr_kind, tr_kappa, tr_v, tr_kgrid, tr_vgrid, tr_out);
        if (rs->parsed()) return cmd_resonance(rs_kappa, rs_k, rs_kgrid, rs_json, rs_out);
        if (sc->parsed()) return cmd_scatter(sc_config);
        if (ce->parsed()) return cmd_compare_effective(ce_config, ce_out);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
