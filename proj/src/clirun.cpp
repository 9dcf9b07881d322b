#include "hfreg/clirun.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <thread>

#include "hfreg/io.hpp"

namespace hfreg::cli {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
    if (!obj.is_object()) throw ConfigError("config: " + path + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key " + path + "." + it.key());
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for key " + key);
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw ConfigError("config: missing key " + path + "." + key);
    return obj.at(key);
}

PotentialSpec parse_potential(const json& jp) {
    check_keys(jp, "system.potential",
               {"kind", "charges", "centers", "separation", "epsilon", "strength"});
    const std::string kind = require(jp, "kind", "system.potential").get<std::string>();
    SingularSet centers;
    centers.separation = get_or(jp, "separation", 0.5);
    if (jp.contains("centers")) {
        for (const auto& c : jp.at("centers")) {
            if (!c.is_array() || c.size() > 3) throw ConfigError("config: bad center coordinates");
            Eigen::Vector3d x = Eigen::Vector3d::Zero();
            for (std::size_t i = 0; i < c.size(); ++i) x(static_cast<int>(i)) = c[i].get<double>();
            centers.centers.push_back(x);
        }
    } else {
        centers.centers.push_back(Eigen::Vector3d::Zero());
    }
    const double epsilon = get_or(jp, "epsilon", 0.5);

    if (kind == "coulomb") {
        std::vector<double> charges;
        for (const auto& z : require(jp, "charges", "system.potential")) charges.push_back(z.get<double>());
        return PotentialSpec::coulomb(std::move(charges), std::move(centers), epsilon);
    }
    if (kind == "harmonic") {
        const double s = get_or(jp, "strength", 1.0);
        PotentialSpec spec;
        spec.kind = PotentialSpec::Kind::smooth_analytic;
        spec.centers = std::move(centers);
        spec.epsilon = epsilon;
        spec.eval = [s](const Eigen::Vector3d& x) { return s * x.squaredNorm(); };
        spec.directional = [s](const Eigen::Vector3d& x, const Eigen::Vector3d& u, int m) {
            if (m == 0) return s * x.squaredNorm();
            if (m == 1) return 2.0 * s * x.dot(u);
            if (m == 2) return 2.0 * s;
            return 0.0;
        };
        spec.radial_profile = [s](double r) { return s * r * r; };
        spec.radial_oracle = [s](int m, double r) {
            if (m == 0) return s * r * r;
            if (m == 1) return 2.0 * s * r;
            if (m == 2) return 2.0 * s;
            return 0.0;
        };
        return spec;
    }
    throw ConfigError("config: unknown value for key system.potential.kind");
}

SystemSpec parse_system(const json& root) {
    const json& js = require(root, "system", "");
    check_keys(js, "system", {"orbitals", "dimension", "kinetic", "coupling", "potential"});
    SystemSpec spec;
    spec.n_orbitals = get_or(js, "orbitals", 1);
    spec.dim = get_or(js, "dimension", 3);
    spec.t = get_or(js, "kinetic", 0.5);
    spec.potential = parse_potential(require(js, "potential", "system"));
    spec.coupling = SystemSpec::zero_coupling(spec.n_orbitals);
    if (js.contains("coupling")) {
        for (const auto& entry : js.at("coupling")) {
            check_keys(entry, "system.coupling[]", {"iota", "sigma", "a", "b", "value"});
            const int iota = require(entry, "iota", "system.coupling[]").get<int>();
            const int sigma = require(entry, "sigma", "system.coupling[]").get<int>();
            const int a = require(entry, "a", "system.coupling[]").get<int>();
            const int b = require(entry, "b", "system.coupling[]").get<int>();
            auto idx = [&](int v) {
                if (v < 1 || v > spec.n_orbitals)
                    throw ConfigError("config: coupling index out of range in system.coupling");
                return v - 1;
            };
            spec.c(idx(iota), idx(sigma), idx(a), idx(b)) =
                require(entry, "value", "system.coupling[]").get<double>();
        }
    }
    spec.validate();
    return spec;
}

SCFConfig parse_scf(const json& root, const Options& options) {
    SCFConfig config;
    if (root.contains("scf")) {
        const json& js = root.at("scf");
        check_keys(js, "scf", {"mixing", "tolerance", "max_iterations"});
        config.mixing = get_or(js, "mixing", config.mixing);
        config.tolerance = get_or(js, "tolerance", config.tolerance);
        config.max_iterations = get_or(js, "max_iterations", config.max_iterations);
    }
    if (root.contains("grid")) {
        const json& jg = root.at("grid");
        check_keys(jg, "grid", {"radius", "cells", "sigma", "points_per_cell"});
        config.grid_radius = get_or(jg, "radius", config.grid_radius);
        config.grid_cells = get_or(jg, "cells", config.grid_cells);
        config.grid_sigma = get_or(jg, "sigma", config.grid_sigma);
        config.grid_points_per_cell = get_or(jg, "points_per_cell", config.grid_points_per_cell);
    }
    if (options.tolerance_override > 0.0) config.tolerance = options.tolerance_override;
    config.validate();
    return config;
}

struct Logger {
    bool quiet;
    void line(const std::string& s) const {
        if (!quiet) std::cout << s << '\n';
    }
};

int command_solve(const json& root, const Options& options, const Logger& log, SCFState* out_state,
                  SystemSpec* out_spec, SCFConfig* out_config) {
    SystemSpec spec = parse_system(root);
    SCFConfig config = parse_scf(root, options);
    SCFState state = scf_solve(spec, config);
    log.line("solve: " + std::to_string(state.iterations) + " iteration(s), residual " +
             io::format_double(state.max_residual()));

    for (std::size_t i = 0; i < state.orbitals.size(); ++i) {
        const auto base = options.out_dir / ("orbital_" + std::to_string(i + 1));
        io::write_text_atomic(base.string() + ".csv", io::field_csv(state.orbitals[i]));
        io::write_text_atomic(base.string() + ".meta.json",
                              io::field_meta(state.orbitals[i]).dump(2) + "\n");
    }
    const int n = spec.n_orbitals;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const auto base =
                options.out_dir / ("u_" + std::to_string(a + 1) + std::to_string(b + 1));
            io::write_text_atomic(base.string() + ".csv", io::field_csv(state.u(a, b)));
        }
    io::write_text_atomic(options.out_dir / "solve_summary.json",
                          io::scf_summary_json(state, spec).dump(2) + "\n");
    if (out_state) *out_state = std::move(state);
    if (out_spec) *out_spec = std::move(spec);
    if (out_config) *out_config = config;
    return (out_state ? out_state->converged : state.converged) ? 0 : 2;
}

int command_envelope(const json& root, const Options& options, const Logger& log) {
    SCFState state;
    SystemSpec spec;
    SCFConfig config;
    const int solve_status = command_solve(root, options, log, &state, &spec, &config);
    if (solve_status != 0) return solve_status;

    double p = 2.0, gamma = 2.4, ball_radius = 0.5;
    int orders = 6;
    if (root.contains("weights")) {
        const json& jw = root.at("weights");
        check_keys(jw, "weights", {"p", "gamma", "orders", "ball_radius"});
        if (jw.contains("p") && jw.at("p").is_string()) {
            if (jw.at("p").get<std::string>() != "inf")
                throw ConfigError("config: weights.p must be a number or \"inf\"");
            p = std::numeric_limits<double>::infinity();
        } else {
            p = get_or(jw, "p", p);
        }
        gamma = get_or(jw, "gamma", gamma);
        orders = get_or(jw, "orders", orders);
        ball_radius = get_or(jw, "ball_radius", ball_radius);
    }
    double eta = 0.45;
    int alpha_max = 10;
    int radii_count = 10;
    double radii_scale = 1.0;
    if (root.contains("envelope")) {
        const json& je = root.at("envelope");
        check_keys(je, "envelope", {"eta", "alpha_max", "radii_count", "radii_scale"});
        eta = get_or(je, "eta", eta);
        alpha_max = get_or(je, "alpha_max", alpha_max);
        radii_count = get_or(je, "radii_count", radii_count);
        radii_scale = get_or(je, "radii_scale", radii_scale);
    }

    // weighted seminorm sequences and their growth certificates
    bool all_pass = true;
    const WeightSpec wspec{p, gamma, spec.dim};
    for (std::size_t i = 0; i < state.orbitals.size(); ++i) {
        auto oracle = orbital_radial_oracle(state, spec, static_cast<int>(i), orders);
        DerivativeField field = radial_derivative_field(spec.dim, oracle);
        Ball ball{Eigen::Vector3d::Zero(), ball_radius};
        SeminormSequence seq;
        seq.spec = wspec;
        seq.ball_radius = ball_radius;
        for (int jord = 0; jord <= orders; ++jord) {
            const bool divergent =
                std::isfinite(p) && (p * (jord - gamma) + spec.dim - 1.0 <= -1.0);
            seq.entries.push_back(divergent ? 0.0
                                            : weighted_seminorm(field, jord, wspec, ball));
        }
        AnalyticEnvelope env = fit_envelope(seq);
        env.kind = AnalyticEnvelope::Kind::non_homogeneous_j;
        const JClassReport jrep = j_class_check(seq, gamma, env.a);
        all_pass = all_pass && jrep.pass;
        const auto base = options.out_dir / ("seminorms_" + std::to_string(i + 1));
        io::write_text_atomic(base.string() + ".csv", io::seminorm_csv(seq));
        nlohmann::json je = io::envelope_json(env);
        je["j_class_pass"] = jrep.pass;
        je["j_class_worst_margin"] = jrep.worst_margin;
        io::write_text_atomic(options.out_dir / ("envelope_" + std::to_string(i + 1) + ".json"),
                              je.dump(2) + "\n");
        log.line("envelope: orbital " + std::to_string(i + 1) + " fitted A " +
                 io::format_double(env.a));
    }

    std::vector<double> radii;
    for (int i = 1; i <= radii_count; ++i) radii.push_back(radii_scale * std::ldexp(1.0, -i));
    EnvelopeStability stability = check_main_envelope_stable(spec, config, eta, alpha_max, radii);
    io::write_text_atomic(options.out_dir / "envelope_report.json",
                          io::envelope_report_json(stability).dump(2) + "\n");
    log.line("envelope: pointwise fitted A " + io::format_double(stability.base.fitted_a) +
             (stability.stable ? " (stable)" : " (unstable)"));
    return (stability.pass && all_pass) ? 0 : 2;
}

template <typename Task>
void run_tasks(int jobs, std::vector<Task>& tasks) {
    if (jobs <= 1) {
        for (Task& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            tasks[i]();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

int command_verify(const json& root, const Options& options, const Logger& log) {
    std::set<std::string> suites = {"constants", "interpolation", "elliptic", "imbedding",
                                    "sequence"};
    double p = 2.0, gamma = 2.0, radius = 1.0;
    int beta_max = 2, k_max = 3, ell_max = 2;
    int sequence_k = 12;
    std::vector<double> c_grid{1.0, 2.0, 10.0};
    std::vector<double> rho_fractions{1.0, 0.25, 0.0625};
    double seq_p = 6.0, seq_gamma_gap = 0.45, seq_eps = 0.95;
    if (root.contains("verify")) {
        const json& jv = root.at("verify");
        check_keys(jv, "verify",
                   {"suites", "p", "gamma", "radius", "beta_max", "k_max", "ell_max", "sequence_k",
                    "constant_grid", "rho_fractions", "sequence_p", "sequence_gamma_gap",
                    "sequence_epsilon"});
        if (jv.contains("suites")) {
            suites.clear();
            for (const auto& s : jv.at("suites")) suites.insert(s.get<std::string>());
        }
        p = get_or(jv, "p", p);
        gamma = get_or(jv, "gamma", gamma);
        radius = get_or(jv, "radius", radius);
        beta_max = get_or(jv, "beta_max", beta_max);
        k_max = get_or(jv, "k_max", k_max);
        ell_max = get_or(jv, "ell_max", ell_max);
        sequence_k = get_or(jv, "sequence_k", sequence_k);
        if (jv.contains("constant_grid"))
            c_grid = jv.at("constant_grid").get<std::vector<double>>();
        if (jv.contains("rho_fractions"))
            rho_fractions = jv.at("rho_fractions").get<std::vector<double>>();
        seq_p = get_or(jv, "sequence_p", seq_p);
        seq_gamma_gap = get_or(jv, "sequence_gamma_gap", seq_gamma_gap);
        seq_eps = get_or(jv, "sequence_epsilon", seq_eps);
    }

    std::vector<InequalityReport> reports;
    if (suites.count("constants")) {
        ConstantsLedger led = lemma_constants(1.0, 1.0, 1.0, 3, 6.0, 2.0);
        io::write_text_atomic(options.out_dir / "constants.json",
                              io::constants_json(led).dump(2) + "\n");
        log.line("verify: constants ledger written");
    }
    if (suites.count("interpolation")) {
        reports.push_back(
            check_interpolation(versioned_interpolation_family(3), p, gamma, beta_max, radius));
        log.line("verify: interpolation fitted C = " +
                 io::format_double(reports.back().fitted_constant));
    }
    if (suites.count("elliptic")) {
        reports.push_back(elliptic_shift_suite(manufactured_elliptic_suite(3), p, gamma, radius, k_max));
        log.line("verify: elliptic-shift fitted C = " +
                 io::format_double(reports.back().fitted_constant));
    }
    if (suites.count("imbedding")) {
        const double gi = 3.0 / p + 0.8;  // gamma - d/p > 0 branch
        InequalityReport merged;
        merged.lemma_id = "imbedding-suite";
        merged.p = p;
        merged.gamma = gi;
        merged.radius = radius;
        merged.pass = true;
        for (double s : {1.0, 1.5, 2.4}) {
            TestField tf;
            tf.name = "r^" + std::to_string(s) + " exp(-r)";
            tf.field = radial_derivative_field(3, power_exp_oracle(s, 1.0));
            for (int ell = 0; ell <= ell_max; ++ell) {
                InequalityReport r = check_imbedding(tf, ell, std::max(p, 2.0), gi, radius);
                merged.case_count += r.case_count;
                merged.max_ratio = std::max(merged.max_ratio, r.max_ratio);
                merged.pass = merged.pass && r.pass;
            }
        }
        merged.fitted_constant = merged.max_ratio;
        reports.push_back(merged);
        log.line("verify: imbedding fitted C = " + io::format_double(merged.fitted_constant));
    }
    if (suites.count("sequence")) {
        std::vector<SequenceSuiteParams> grid;
        for (double cphi : c_grid)
            for (double aphi : c_grid)
                for (double frac : rho_fractions)
                    for (int k : {2, sequence_k / 2 + 2, sequence_k}) {
                        SequenceSuiteParams prm;
                        prm.c_phi = cphi;
                        prm.a_phi = aphi;
                        prm.k = k;
                        prm.p = seq_p;
                        prm.dim = 3;
                        prm.epsilon = seq_eps;
                        prm.gamma = 3.0 / seq_p + seq_gamma_gap;
                        prm.rho = frac * prm.radius / (2.0 * k);
                        grid.push_back(prm);
                    }
        std::vector<std::vector<InequalityReport>> results(grid.size());
        std::vector<std::function<void()>> tasks;
        for (std::size_t i = 0; i < grid.size(); ++i)
            tasks.push_back([&, i]() { results[i] = sequence_lemma_suite(grid[i]); });
        run_tasks(options.jobs, tasks);
        InequalityReport merged;
        merged.lemma_id = "sequence-suite";
        merged.p = seq_p;
        merged.gamma = 3.0 / seq_p + seq_gamma_gap;
        merged.k = sequence_k;
        merged.radius = 1.0;
        merged.pass = true;
        for (const auto& rs : results)
            for (const auto& r : rs) {
                merged.case_count += r.case_count;
                merged.max_ratio = std::max(merged.max_ratio, r.max_ratio);
                if (!r.pass) {
                    merged.pass = false;
                    if (merged.note.empty()) merged.note = r.lemma_id + ": " + r.note;
                }
            }
        merged.fitted_constant = merged.max_ratio;
        reports.push_back(merged);
        log.line(std::string("verify: sequence suite ") + (merged.pass ? "passed" : "FAILED") +
                 " over " + std::to_string(grid.size()) + " parameter sets");
    }

    bool all_pass = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        io::write_text_atomic(options.out_dir / ("report_" + reports[i].lemma_id + ".json"),
                              io::inequality_json(reports[i]).dump(2) + "\n");
        all_pass = all_pass && reports[i].pass;
    }
    io::write_text_atomic(options.out_dir / "verify_summary.csv", io::reports_csv(reports));
    return all_pass ? 0 : 2;
}

int command_hp(const json& root, const Options& options, const Logger& log) {
    std::string target = "cusp";
    double exponent = 0.5, radius = 1.0, sigma = 0.2, degree_slope = 1.0;
    int levels = 12, uniform_degree = 3, uniform_levels = 7;
    if (root.contains("hp")) {
        const json& jh = root.at("hp");
        check_keys(jh, "hp",
                   {"target", "exponent", "radius", "sigma", "levels", "degree_slope",
                    "uniform_degree", "uniform_levels"});
        target = get_or<std::string>(jh, "target", target);
        exponent = get_or(jh, "exponent", exponent);
        radius = get_or(jh, "radius", radius);
        sigma = get_or(jh, "sigma", sigma);
        levels = get_or(jh, "levels", levels);
        degree_slope = get_or(jh, "degree_slope", degree_slope);
        uniform_degree = get_or(jh, "uniform_degree", uniform_degree);
        uniform_levels = get_or(jh, "uniform_levels", uniform_levels);
    }
    std::function<double(double)> f;
    if (target == "cusp") {
        f = [exponent](double r) { return std::pow(r, exponent) * std::exp(-r); };
    } else if (target == "analytic") {
        f = [](double r) { return std::exp(-r); };
    } else {
        throw ConfigError("config: unknown value for key hp.target");
    }
    HpResult graded = hp_convergence_demo(f, radius, 3, sigma, levels, degree_slope);
    HpResult uniform = hp_uniform_control(f, radius, 3, uniform_degree, uniform_levels);
    io::write_text_atomic(options.out_dir / "hp_geometric.csv", io::hp_csv(graded));
    io::write_text_atomic(options.out_dir / "hp_uniform.csv", io::hp_csv(uniform));
    io::write_text_atomic(options.out_dir / "hp_fit.json",
                          io::hp_fit_json(graded, uniform).dump(2) + "\n");
    const bool pass = graded.fit_sqrt_dof.slope < 0.0 &&
                      graded.fit_sqrt_dof.correlation <= -0.98;
    log.line("hp: slope " + io::format_double(graded.fit_sqrt_dof.slope) + ", correlation " +
             io::format_double(graded.fit_sqrt_dof.correlation));
    return pass ? 0 : 2;
}

}  // namespace

int run(const Options& options) {
    Logger log{options.quiet};
    json root;
    try {
        std::ifstream in(options.config_path);
        if (!in) {
            std::cerr << "error: cannot read config file " << options.config_path << '\n';
            return 1;
        }
        root = json::parse(in);
        check_keys(root, "(root)", {"system", "grid", "scf", "weights", "envelope", "verify", "hp"});
    } catch (const json::parse_error& e) {
        std::cerr << "error: config parse failure: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (options.command == "solve") return command_solve(root, options, log, nullptr, nullptr, nullptr);
        if (options.command == "envelope") return command_envelope(root, options, log);
        if (options.command == "verify") return command_verify(root, options, log);
        if (options.command == "hp") return command_hp(root, options, log);
        if (options.command == "all") {
            int worst = 0;
            for (const char* cmd : {"solve", "envelope", "verify", "hp"}) {
                Options sub = options;
                sub.command = cmd;
                const int status = run(sub);
                if (status == 1) return 1;
                worst = std::max(worst, status);
            }
            return worst;
        }
        std::cerr << "error: unknown command " << options.command << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace hfreg::cli
