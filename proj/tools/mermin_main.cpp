// Command-line front end: every library capability behind file-based I/O,
// machine-readable run reports and stable exit codes (0 success, 2 validation,
// 3 cap exceeded, 4 precondition failed).

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mermin/mermin.hpp"

namespace {

using nlohmann::json;
using namespace mermin;

constexpr const char* kVersion = "1.0.0";

constexpr int kExitValidation = 2;
constexpr int kExitCap = 3;
constexpr int kExitPrecondition = 4;

struct ReportBuilder {
    json doc;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit ReportBuilder(const std::string& command) {
        doc["schema"] = io::kReportSchema;
        doc["version"] = kVersion;
        doc["command"] = command;
        doc["parameters"] = json::object();
        doc["inputs"] = json::array();
        doc["seeds"] = json::array();
        doc["outputs"] = json::object();
    }

    void param(const std::string& key, const json& value) { doc["parameters"][key] = value; }
    void input(const std::string& path) {
        doc["inputs"].push_back({{"path", path}, {"digest", io::file_digest(path)}});
    }
    void seed(std::uint64_t s) { doc["seeds"].push_back(s); }
    json& outputs() { return doc["outputs"]; }

    void emit(const std::string& report_path) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        doc["wall_time_s"] = elapsed.count();
        const std::string text = doc.dump(2) + "\n";
        if (report_path.empty()) {
            std::cout << text;
        } else {
            io::write_file(report_path, text);
        }
    }
};

json json_complex(const cx& z) { return json::array({z.real(), z.imag()}); }

json json_matrix2(const Matrix2& m) {
    json rows = json::array();
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) rows.push_back(json_complex(m(r, c)));
    }
    return rows;
}

json json_settings_inline(const MeasurementSettings& s) {
    json out = io::settings_to_json(s);
    out.erase("schema");
    return out;
}

unsigned default_threads() {
    if (const char* env = std::getenv("MERMIN_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1 && parsed <= 256) return static_cast<unsigned>(parsed);
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Subcommand implementations

struct CommonFlags {
    std::string report_path;
};

void cmd_generate_settings(const std::string& kind, int n, std::uint64_t seed,
                           const std::string& out, const CommonFlags& common) {
    ReportBuilder report("generate-settings");
    report.param("kind", kind);
    report.param("n", n);
    report.param("out", out);

    std::optional<MeasurementSettings> settings;
    if (kind == "xy") {
        settings = MeasurementSettings::xy(n);
    } else {
        report.param("seed", seed);
        report.seed(seed);
        Rng rng(seed);
        settings = kind == "random" ? random_settings(n, rng)
                                    : random_orthogonal_settings(n, rng);
    }
    io::save_settings(*settings, out);
    report.outputs()["settings_file"] = out;
    report.outputs()["digest"] = io::file_digest(out);
    report.emit(common.report_path);
}

void cmd_generate_state(const std::string& kind, int n, const std::string& out,
                        const CommonFlags& common) {
    ReportBuilder report("generate-state");
    report.param("kind", kind);
    report.param("n", n);
    report.param("out", out);
    const StateVector state = kind == "ghz" ? ghz_state(n) : w_state(n);
    io::save_state(state, out);
    report.outputs()["state_file"] = out;
    report.outputs()["digest"] = io::file_digest(out);
    report.emit(common.report_path);
}

void cmd_build(const std::string& settings_path, const std::string& form,
               const std::string& out, const CommonFlags& common) {
    ReportBuilder report("build");
    report.param("form", form);
    report.param("out", out);
    report.input(settings_path);
    const MeasurementSettings settings = io::load_settings(settings_path);

    const DenseOperator op = form == "product" ? build_mermin_product_form(settings)
                                               : build_mermin_expansion(settings);
    io::save_operator(op, out);
    report.outputs()["operator_file"] = out;
    report.outputs()["n"] = op.n;
    report.outputs()["max_entry_magnitude"] = op.entries.cwiseAbs().maxCoeff();
    report.outputs()["hermiticity_residual"] =
        (op.entries - op.entries.adjoint()).cwiseAbs().maxCoeff();
    report.emit(common.report_path);
}

void cmd_lhv(int n, unsigned threads, const CommonFlags& common) {
    ReportBuilder report("lhv");
    report.param("n", n);
    report.param("threads", threads);
    const LhvResult result = lhv_max(n, threads);
    json& out = report.outputs();
    out["max_value"] = result.max_value;
    out["bound_formula"] = result.bound_formula;
    out["strategies_scanned"] = result.strategies_scanned;
    out["argmax"] = {{"eps", result.argmax.eps}, {"eps_prime", result.argmax.eps_prime}};
    out["quantum_norm_bound"] = std::exp2(n - 1);
    if (n >= 3) out["violation_ratio"] = violation_ratio(n);
    report.emit(common.report_path);
}

void cmd_quantum_max(const std::string& settings_path, const std::string& out_state,
                     const CommonFlags& common) {
    ReportBuilder report("quantum-max");
    report.input(settings_path);
    const MeasurementSettings settings = io::load_settings(settings_path);
    const auto [value, state] = optimal_state(settings);
    const double norm = operator_norm(build_mermin_product_form(settings));
    json& out = report.outputs();
    out["top_eigenvalue"] = value;
    out["operator_norm"] = norm;
    out["norm_bound"] = std::exp2(settings.n - 1);
    if (!out_state.empty()) {
        io::save_state(state, out_state);
        out["state_file"] = out_state;
        out["state_digest"] = io::file_digest(out_state);
    }
    report.emit(common.report_path);
}

void cmd_seesaw(const std::string& state_path, const std::string& settings_path,
                const SeesawConfig& config, const std::string& out_settings,
                const std::string& csv_path, const CommonFlags& common) {
    ReportBuilder report("seesaw");
    report.input(state_path);
    report.param("restarts", config.restarts);
    report.param("max_sweeps", config.max_sweeps);
    report.param("convergence_tol", config.convergence_tol);
    report.param("seed", config.seed);
    report.seed(config.seed);

    const StateVector state = io::load_state(state_path);
    std::optional<MeasurementSettings> init;
    if (!settings_path.empty()) {
        report.input(settings_path);
        init = io::load_settings(settings_path);
    } else {
        init = MeasurementSettings::xy(state.n);
    }

    const SeesawResult result = seesaw_settings(state, *init, config);
    json& out = report.outputs();
    out["best_value"] = result.best_value;
    out["sweeps_used"] = result.sweeps_used;
    out["restart_index"] = result.restart_index;
    out["zero_gradient_events"] = result.zero_gradient_events;
    out["history"] = result.history;
    out["best_settings"] = json_settings_inline(result.best_settings);
    if (!out_settings.empty()) {
        io::save_settings(result.best_settings, out_settings);
        out["settings_file"] = out_settings;
    }
    if (!csv_path.empty()) {
        std::string csv = "sweep,objective\n";
        for (std::size_t k = 0; k < result.history.size(); ++k) {
            csv += std::to_string(k + 1) + "," + std::to_string(result.history[k]) + "\n";
        }
        io::write_file(csv_path, csv);
        out["csv_file"] = csv_path;
    }
    report.emit(common.report_path);
}

void cmd_extract(const std::string& state_path, const std::string& settings_path,
                 const CommonFlags& common) {
    ReportBuilder report("extract");
    report.input(state_path);
    report.input(settings_path);
    const StateVector state = io::load_state(state_path);
    const MeasurementSettings settings = io::load_settings(settings_path);

    const ExtractionWitness witness = extract_ghz_lu(state, settings);
    json& out = report.outputs();
    out["fidelity_residual"] = witness.fidelity_residual;
    out["overlap"] = json_complex(witness.overlap);
    out["overlap_arg"] = std::arg(witness.overlap);
    out["phi"] = witness.phi;
    out["theta"] = witness.theta;
    out["a_coeff"] = json_complex(witness.a_coeff);
    out["b_coeff"] = json_complex(witness.b_coeff);
    out["alphas"] = witness.alphas;
    json us = json::array(), vs = json::array();
    for (const Matrix2& u : witness.U) us.push_back(json_matrix2(u));
    for (const Matrix2& v : witness.V) vs.push_back(json_matrix2(v));
    out["U"] = std::move(us);
    out["V"] = std::move(vs);
    report.emit(common.report_path);
}

void cmd_sample(const std::string& state_path, const std::string& settings_path,
                std::uint64_t shots, std::uint64_t seed, const std::string& csv_path,
                const CommonFlags& common) {
    ReportBuilder report("sample");
    report.input(state_path);
    report.input(settings_path);
    report.param("shots_per_term", shots);
    report.param("seed", seed);
    report.seed(seed);

    const StateVector state = io::load_state(state_path);
    const MeasurementSettings settings = io::load_settings(settings_path);
    const MerminEstimate estimate = estimate_mermin(state, settings, shots, seed);

    json& out = report.outputs();
    out["value"] = estimate.value;
    out["std_error"] = estimate.std_error;
    out["exact_mode"] = shots == kExactShots;
    json per_term = json::array();
    for (const TermEstimate& te : estimate.per_term) {
        per_term.push_back({{"primed", te.term.primed},
                            {"sign", te.term.sign},
                            {"estimate", te.estimate},
                            {"std_error", te.std_error}});
    }
    out["per_term"] = std::move(per_term);
    if (!csv_path.empty()) {
        std::string csv = "term_index,primed,sign,estimate,std_error\n";
        for (std::size_t k = 0; k < estimate.per_term.size(); ++k) {
            const TermEstimate& te = estimate.per_term[k];
            std::string primed;
            for (int j : te.term.primed) {
                if (!primed.empty()) primed += "|";
                primed += std::to_string(j);
            }
            csv += std::to_string(k) + "," + primed + "," + std::to_string(te.term.sign) + "," +
                   std::to_string(te.estimate) + "," + std::to_string(te.std_error) + "\n";
        }
        io::write_file(csv_path, csv);
        out["csv_file"] = csv_path;
    }
    report.emit(common.report_path);
}

void cmd_verify_identities(int n, int trials, std::uint64_t seed, const std::string& csv_path,
                           const CommonFlags& common) {
    ReportBuilder report("verify-identities");
    report.param("n", n);
    report.param("trials", trials);
    report.param("seed", seed);
    report.seed(seed);
    if (trials < 1) throw validation_error("verify-identities: need at least one trial");

    Rng rng(seed);
    double max_builder_residual = 0.0;
    double max_squared_residual = 0.0;
    double max_norm_excess = -1e300;
    double max_bound_gap = -1e300; // operator_norm(M^2) - scalar bound, should stay <= 0
    std::string csv = "trial,builder_residual,squared_residual,operator_norm,norm_excess\n";
    for (int trial = 0; trial < trials; ++trial) {
        const MeasurementSettings s = random_settings(n, rng);
        const DenseOperator product = build_mermin_product_form(s);
        const DenseOperator expansion = build_mermin_expansion(s);
        const double builder_residual =
            (product.entries - expansion.entries).cwiseAbs().maxCoeff();
        const double squared_residual = mermin_squared_identity_check(s).max_abs_residual;
        const double norm = operator_norm(product);
        const double norm_excess = norm - std::exp2(n - 1);
        const double bound_gap = norm * norm - norm_bound_scalar(orthogonality_defects(s).defects);

        max_builder_residual = std::max(max_builder_residual, builder_residual);
        max_squared_residual = std::max(max_squared_residual, squared_residual);
        max_norm_excess = std::max(max_norm_excess, norm_excess);
        max_bound_gap = std::max(max_bound_gap, bound_gap);
        csv += std::to_string(trial) + "," + std::to_string(builder_residual) + "," +
               std::to_string(squared_residual) + "," + std::to_string(norm) + "," +
               std::to_string(norm_excess) + "\n";
    }

    json& out = report.outputs();
    out["max_builder_residual"] = max_builder_residual;
    out["max_squared_identity_residual"] = max_squared_residual;
    out["max_norm_excess"] = max_norm_excess;
    out["max_scalar_bound_gap"] = max_bound_gap;
    out["builders_agree"] = max_builder_residual < 1e-12;
    out["squared_identity_holds"] = max_squared_residual < 1e-10;
    out["norm_bound_holds"] = max_norm_excess <= 1e-9;
    out["scalar_bound_dominates"] = max_bound_gap <= 1e-9;
    if (!csv_path.empty()) {
        io::write_file(csv_path, csv);
        out["csv_file"] = csv_path;
    }
    report.emit(common.report_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell-Mermin operator toolkit: builders, bounds, characterization, sampling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonFlags common;
    app.add_option("--report", common.report_path,
                   "write the JSON run report here instead of stdout");
    unsigned threads = default_threads();
    app.add_option("--threads", threads,
                   "worker thread cap (default from MERMIN_THREADS); never changes results");

    // generate-settings
    auto* gen_settings = app.add_subcommand("generate-settings", "emit a settings file");
    std::string gs_kind = "xy";
    int gs_n = 3;
    std::uint64_t gs_seed = 0;
    std::string gs_out;
    gen_settings->add_option("--kind", gs_kind)
        ->check(CLI::IsMember({"xy", "random", "random-orthogonal"}));
    gen_settings->add_option("--n", gs_n)->required();
    gen_settings->add_option("--seed", gs_seed);
    gen_settings->add_option("--out", gs_out)->required();

    // generate-state
    auto* gen_state = app.add_subcommand("generate-state", "emit a GHZ or W state file");
    std::string gst_kind = "ghz";
    int gst_n = 3;
    std::string gst_out;
    gen_state->add_option("--kind", gst_kind)->check(CLI::IsMember({"ghz", "w"}));
    gen_state->add_option("--n", gst_n)->required();
    gen_state->add_option("--out", gst_out)->required();

    // build
    auto* build = app.add_subcommand("build", "construct the dense Bell-Mermin operator");
    std::string b_settings, b_out, b_form = "product";
    build->add_option("--settings", b_settings)->required();
    build->add_option("--out", b_out)->required();
    build->add_option("--form", b_form)->check(CLI::IsMember({"product", "expansion"}));

    // lhv
    auto* lhv = app.add_subcommand("lhv", "exhaustive local-hidden-variable maximum");
    int l_n = 3;
    lhv->add_option("--n", l_n)->required();

    // quantum-max
    auto* qmax = app.add_subcommand("quantum-max", "top eigenvalue and operator norm");
    std::string q_settings, q_out_state;
    qmax->add_option("--settings", q_settings)->required();
    qmax->add_option("--out-state", q_out_state);

    // seesaw
    auto* seesaw = app.add_subcommand("seesaw", "coordinate-ascent settings search");
    std::string sw_state, sw_settings, sw_out_settings, sw_csv;
    SeesawConfig sw_config;
    seesaw->add_option("--state", sw_state)->required();
    seesaw->add_option("--settings", sw_settings, "initial settings (default: x/y)");
    seesaw->add_option("--restarts", sw_config.restarts);
    seesaw->add_option("--max-sweeps", sw_config.max_sweeps);
    seesaw->add_option("--tol", sw_config.convergence_tol);
    seesaw->add_option("--seed", sw_config.seed);
    seesaw->add_option("--out-settings", sw_out_settings);
    seesaw->add_option("--csv", sw_csv);

    // extract
    auto* extract = app.add_subcommand("extract", "recover the GHZ local unitaries");
    std::string e_state, e_settings;
    extract->add_option("--state", e_state)->required();
    extract->add_option("--settings", e_settings)->required();

    // sample
    auto* sample = app.add_subcommand("sample", "finite-shot Mermin estimate");
    std::string sm_state, sm_settings, sm_csv;
    std::uint64_t sm_shots = 10000, sm_seed = 0;
    sample->add_option("--state", sm_state)->required();
    sample->add_option("--settings", sm_settings)->required();
    sample->add_option("--shots", sm_shots, "shots per term; 0 = exact probabilities");
    sample->add_option("--seed", sm_seed);
    sample->add_option("--csv", sm_csv);

    // verify-identities
    auto* verify = app.add_subcommand("verify-identities",
                                      "builder equivalence, squared identity, norm bounds");
    int v_n = 3, v_trials = 100;
    std::uint64_t v_seed = 0;
    std::string v_csv;
    verify->add_option("--n", v_n)->required();
    verify->add_option("--trials", v_trials);
    verify->add_option("--seed", v_seed);
    verify->add_option("--csv", v_csv);

    // Let --report/--threads appear after the subcommand name as well.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*gen_settings) {
            cmd_generate_settings(gs_kind, gs_n, gs_seed, gs_out, common);
        } else if (*gen_state) {
            cmd_generate_state(gst_kind, gst_n, gst_out, common);
        } else if (*build) {
            cmd_build(b_settings, b_form, b_out, common);
        } else if (*lhv) {
            cmd_lhv(l_n, threads, common);
        } else if (*qmax) {
            cmd_quantum_max(q_settings, q_out_state, common);
        } else if (*seesaw) {
            cmd_seesaw(sw_state, sw_settings, sw_config, sw_out_settings, sw_csv, common);
        } else if (*extract) {
            cmd_extract(e_state, e_settings, common);
        } else if (*sample) {
            cmd_sample(sm_state, sm_settings, sm_shots, sm_seed, sm_csv, common);
        } else if (*verify) {
            cmd_verify_identities(v_n, v_trials, v_seed, v_csv, common);
        }
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const cap_exceeded_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
