#include "hfreg/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hfreg::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string field_csv(const RadialField& field) {
    std::string s = "r,value\n";
    for (int i = 0; i < field.mesh.dof_count(); ++i) {
        s += format_double(field.mesh.dofs(i));
        s += ',';
        s += format_double(field.values(i));
        s += '\n';
    }
    return s;
}

nlohmann::json field_meta(const RadialField& field) {
    return {{"dimension", field.dim},
            {"grid", {{"radius", field.grid.radius},
                      {"n_cells", field.grid.n_cells},
                      {"sigma", field.grid.sigma}}},
            {"dofs", field.mesh.dof_count()},
            {"l2_norm", field.l2_norm()},
            {"sup_norm", field.sup_norm()}};
}

std::string seminorm_csv(const SeminormSequence& seq) {
    std::string s = "j,seminorm,p,gamma,R\n";
    for (std::size_t j = 0; j < seq.entries.size(); ++j) {
        s += std::to_string(j);
        s += ',';
        s += format_double(seq.entries[j]);
        s += ',';
        s += std::isfinite(seq.spec.p) ? format_double(seq.spec.p) : "inf";
        s += ',';
        s += format_double(seq.spec.gamma);
        s += ',';
        s += format_double(seq.ball_radius);
        s += '\n';
    }
    return s;
}

nlohmann::json envelope_json(const AnalyticEnvelope& env) {
    const char* kind = env.kind == AnalyticEnvelope::Kind::homogeneous_k ? "homogeneous-K"
                       : env.kind == AnalyticEnvelope::Kind::non_homogeneous_j ? "non-homogeneous-J"
                                                                               : "pointwise";
    return {{"C", env.c}, {"A", env.a}, {"eta_or_gamma", env.eta_or_gamma},
            {"kind", kind}, {"argmax_order", env.argmax_order}};
}

nlohmann::json inequality_json(const InequalityReport& report) {
    return {{"lemma", report.lemma_id},
            {"cases", report.case_count},
            {"max_ratio", report.max_ratio},
            {"fitted_constant", report.fitted_constant},
            {"pass", report.pass},
            {"parameters",
             {{"p", report.p}, {"gamma", report.gamma}, {"k", report.k}, {"rho", report.rho},
              {"R", report.radius}}},
            {"note", report.note}};
}

std::string reports_csv(const std::vector<InequalityReport>& reports) {
    std::string s = "lemma,cases,max_ratio,fitted_constant,pass,p,gamma,k,rho,R\n";
    for (const auto& r : reports) {
        s += r.lemma_id;
        s += ',' + std::to_string(r.case_count);
        s += ',' + format_double(r.max_ratio);
        s += ',' + format_double(r.fitted_constant);
        s += r.pass ? ",1" : ",0";
        s += ',' + format_double(r.p);
        s += ',' + format_double(r.gamma);
        s += ',' + std::to_string(r.k);
        s += ',' + format_double(r.rho);
        s += ',' + format_double(r.radius);
        s += '\n';
    }
    return s;
}

nlohmann::json constants_json(const ConstantsLedger& led) {
    auto prov = [&](const char* name) {
        switch (led.provenance.at(name)) {
            case Provenance::formula: return "formula";
            case Provenance::fitted: return "fitted";
            default: return "external";
        }
    };
    nlohmann::json j;
    auto put = [&](const char* name, double value) {
        j[name] = {{"value", value}, {"provenance", prov(name)}};
    };
    put("c_interp", led.c_interp);
    put("c_reg_p", led.c_reg_p);
    put("c_s_p", led.c_s_p);
    put("c_1", led.c_1);
    put("c_2_p", led.c_2_p);
    put("c_3_p", led.c_3_p);
    put("c_4", led.c_4);
    j["theta"] = led.theta;
    j["gamma_tilde"] = led.gamma_tilde;
    j["golden_ratio"] = led.frak_f;
    j["zeta_3_2"] = led.zeta_3_2;
    return j;
}

nlohmann::json scf_summary_json(const SCFState& state, const SystemSpec& spec) {
    nlohmann::json j;
    j["lambdas"] = state.lambdas;
    j["orbital_residuals"] = state.orbital_residuals;
    j["poisson_residuals"] = state.poisson_residuals;
    j["iterations"] = state.iterations;
    j["converged"] = state.converged;
    j["monotone_tail"] = state.monotone_tail;
    j["uab_sup_norm"] = uab_sup_norm(state);
    j["n_orbitals"] = spec.n_orbitals;
    j["dimension"] = spec.dim;
    j["kinetic"] = spec.t;
    if (!state.note.empty()) j["note"] = state.note;
    if (!state.orbitals.empty()) {
        j["grid"] = {{"radius", state.orbitals[0].grid.radius},
                     {"n_cells", state.orbitals[0].grid.n_cells},
                     {"sigma", state.orbitals[0].grid.sigma},
                     {"boundary_value", std::abs(state.orbitals[0].values(state.orbitals[0].values.size() - 1))}};
    }
    return j;
}

nlohmann::json envelope_report_json(const EnvelopeStability& stability) {
    const EnvelopeReport& base = stability.base;
    return {{"pass", stability.pass},
            {"fitted_A", base.fitted_a},
            {"per_orbital_A", base.per_orbital_a},
            {"eta", base.eta},
            {"alpha_max", base.alpha_max},
            {"binding",
             {{"orbital", base.binding.orbital}, {"order", base.binding.order},
              {"radius", base.binding.radius}, {"q", base.binding.q}}},
            {"A_doubled_radii", stability.a_doubled_radii},
            {"A_refined_grid", stability.a_refined_grid},
            {"stable_within_20pct", stability.stable},
            {"note", base.note}};
}

std::string hp_csv(const HpResult& result) {
    std::string s = "dof,error\n";
    for (const HpPoint& p : result.table) {
        s += std::to_string(p.dof);
        s += ',' + format_double(p.error) + '\n';
    }
    return s;
}

nlohmann::json hp_fit_json(const HpResult& graded, const HpResult& uniform) {
    auto fit = [](const HpFit& f) {
        return nlohmann::json{{"slope", f.slope}, {"intercept", f.intercept},
                              {"correlation", f.correlation}};
    };
    return {{"graded_sqrt_dof", fit(graded.fit_sqrt_dof)},
            {"graded_log_dof", fit(graded.fit_log_dof)},
            {"uniform_log_dof", fit(uniform.fit_log_dof)}};
}

}  // namespace hfreg::io
