#pragma once

// JSON serialization for configs and reports (nlohmann, ordered keys so
// fixed-seed runs emit byte-identical files) and small CSV helpers.

#include <json.hpp>

#include <fstream>

#include "ztm/kloosterman_forms.hpp"
#include "ztm/moments.hpp"

namespace ztm {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configs
// ---------------------------------------------------------------------------

inline ordered_json weights_config_json(const SmoothingPair& six = {}) {
    ordered_json j;
    j["phi"]["kind"] = "cinf-bump-[1,2]";
    j["G"]["kind"] = "logbump-window-40";
    j["G"]["w_cutoff"] = kWCutoff;
    j["partition"]["x_min"] = 1.0;
    j["partition"]["x_max"] = 1048576.0;
    j["six"]["theta"] = six.theta;
    j["six"]["delta"] = six.delta;
    j["six"]["N"] = six.N;
    return j;
}

inline ordered_json to_json(const CoeffModel& m) {
    ordered_json j;
    j["kind"] = coeff_kind_name(m.kind);
    j["seed"] = m.seed;
    j["lo"] = m.lo;
    j["hi"] = m.hi;
    switch (m.kind) {
        case CoeffModel::Kind::frac_order: j["frac_k"] = m.frac_k; break;
        case CoeffModel::Kind::smooth_psi:
            j["psi_T"] = m.psi_T;
            j["psi_xi1"] = m.psi_xi1;
            break;
        case CoeffModel::Kind::prime_indicator:
            j["residue_r"] = m.residue_r;
            j["residue_q"] = m.residue_q;
            break;
        case CoeffModel::Kind::convolution_product:
            if (m.left) j["left"] = to_json(*m.left);
            if (m.right) j["right"] = to_json(*m.right);
            break;
        default: break;
    }
    return j;
}

inline CoeffModel coeff_model_from_json(const ordered_json& j) {
    CoeffModel m;
    std::string k = j.value("kind", "unit");
    if (k == "unit") m.kind = CoeffModel::Kind::unit;
    else if (k == "random_disk") m.kind = CoeffModel::Kind::random_disk;
    else if (k == "random_sign") m.kind = CoeffModel::Kind::random_sign;
    else if (k == "smooth_psi") m.kind = CoeffModel::Kind::smooth_psi;
    else if (k == "prime_indicator") m.kind = CoeffModel::Kind::prime_indicator;
    else if (k == "frac_order") m.kind = CoeffModel::Kind::frac_order;
    else if (k == "convolution_product") m.kind = CoeffModel::Kind::convolution_product;
    else throw ConfigInvalid("coeff model: unknown kind '" + k + "'");
    m.seed = j.value("seed", std::uint64_t{1});
    m.lo = j.value("lo", std::uint64_t{1});
    m.hi = j.value("hi", std::uint64_t{0});
    m.frac_k = j.value("frac_k", std::uint64_t{2});
    m.psi_T = j.value("psi_T", 1000.0);
    m.psi_xi1 = j.value("psi_xi1", 0.1);
    m.residue_r = j.value("residue_r", std::uint64_t{1});
    m.residue_q = j.value("residue_q", std::uint64_t{4});
    if (j.contains("left")) m.left = std::make_shared<CoeffModel>(coeff_model_from_json(j["left"]));
    if (j.contains("right"))
        m.right = std::make_shared<CoeffModel>(coeff_model_from_json(j["right"]));
    return m;
}

inline CoeffModel coeff_model_from_name(const std::string& k, std::uint64_t seed) {
    ordered_json j;
    j["kind"] = k;
    j["seed"] = seed;
    return coeff_model_from_json(j);
}

inline ordered_json to_json(const QuadratureSpec& q) {
    ordered_json j;
    j["rule"] = q.rule == QuadratureSpec::Rule::simpson ? "simpson" : "gauss_legendre_panels";
    j["panel_width"] = q.panel_width;
    j["nodes_per_panel"] = q.nodes_per_panel;
    return j;
}

inline ordered_json to_json(const ZetaEvalConfig& z) {
    ordered_json j;
    j["method"] = z.method == ZetaMethod::riemann_siegel ? "riemann_siegel" : "euler_maclaurin";
    j["target_abs_error"] = z.target_abs_error;
    j["em_terms"] = z.em_terms;
    j["em_cutoff_multiplier"] = z.em_cutoff_multiplier;
    return j;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline ordered_json to_json(const MomentReport& r) {
    ordered_json j;
    j["value"] = r.value;
    j["abs_error_estimate"] = r.abs_error_estimate;
    j["evaluations"] = r.evaluations;
    j["wall_time"] = r.wall_time;
    return j;
}

inline ordered_json to_json(const MomentExperimentReport& r) {
    ordered_json j;
    j["T"] = r.T;
    j["theta"] = r.theta;
    j["N"] = r.N;
    j["beyond_half_regime"] = r.beyond_half_regime;
    j["mean_rel_dev"] = r.mean_rel_dev;
    j["max_rel_dev"] = r.max_rel_dev;
    ordered_json rows = ordered_json::array();
    for (const auto& t : r.trials) {
        ordered_json row;
        row["trial"] = t.trial;
        row["seed"] = t.seed;
        row["i_direct"] = t.i_direct;
        row["main_term"] = t.main;
        row["rel_dev"] = t.rel_dev;
        row["negative_log_pairs"] = t.negative_log_pairs;
        rows.push_back(row);
    }
    j["trials"] = rows;
    return j;
}

inline ordered_json to_json(const BoundReport& r) {
    ordered_json j;
    j["trial"] = r.trial;
    j["seed"] = r.seed;
    j["s_abs"] = r.s_abs;
    j["rhs_conjecture"] = r.rhs_conjecture;
    j["ratio_conjecture"] = r.ratio_conjecture;
    j["rhs_bcr"] = r.rhs_bcr;
    j["ratio_bcr"] = r.ratio_bcr;
    j["bcr_admissible"] = r.bcr_admissible;
    j["rhs_dfi"] = r.rhs_dfi;
    j["ratio_dfi"] = r.ratio_dfi;
    j["dfi_admissible"] = r.dfi_admissible;
    j["norm_alpha"] = r.norm_alpha;
    j["norm_beta"] = r.norm_beta;
    j["norm_nu"] = r.norm_nu;
    return j;
}

inline ordered_json to_json(const TrilinearSpec& s) {
    ordered_json j;
    j["A"] = s.A;
    j["M"] = s.M;
    j["N"] = s.N;
    auto seq = [](const std::vector<cplx>& v) {
        ordered_json a = ordered_json::array();
        for (auto& x : v) a.push_back({x.real(), x.imag()});
        return a;
    };
    j["nu"] = seq(s.nu);
    j["alpha"] = seq(s.alpha);
    j["beta"] = seq(s.beta);
    return j;
}

inline ordered_json to_json(const LowerBoundResult& r) {
    ordered_json j;
    j["s_abs"] = r.s_abs;
    j["poisson_prediction"] = r.poisson_prediction;
    j["ratio"] = r.ratio;
    j["s_over_ma"] = r.s_over_ma;
    j["nu_primes"] = r.nu_primes;
    j["beta_primes"] = r.beta_primes;
    // ranges are [X, 2X); the closed right endpoint of the construction in
    // its source formulation carries f(2M) = 0, so nothing is dropped
    j["range_convention"] = "[X,2X)";
    return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigInvalid("cannot open output file: " + path);
    os << text;
}

inline void write_json_report(const std::string& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ztm
