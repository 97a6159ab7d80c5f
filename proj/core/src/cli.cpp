#include "spikelab/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "spikelab/amp.hpp"
#include "spikelab/grid.hpp"
#include "spikelab/oracle.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/potential.hpp"
#include "spikelab/prior.hpp"
#include "spikelab/scalar_channel.hpp"
#include "spikelab/state_evolution.hpp"
#include "spikelab/version.hpp"
#include "spikelab/wishart.hpp"

namespace spikelab::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON in '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    return cfg;
}

// Flags win over the config file: a JSON key fills a value only when the
// matching option was not given on the command line.
template <class T>
void merge(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    if (!cfg.contains(key)) return;
    try {
        value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

bool provided(const CLI::Option* opt, const json& cfg, const char* key) {
    return (opt != nullptr && opt->count() > 0) || cfg.contains(key);
}

struct CommonOpts {
    std::string config_path;
    std::string prior_kind = "bernoulli";
    double rho = 0.1;
    int quad_nodes = 2000;
    double quad_half_width = 10.0;
    unsigned threads = 0;
    std::string gamma_text, lambda_text, w_text;

    CLI::Option* opt_prior = nullptr;
    CLI::Option* opt_rho = nullptr;
    CLI::Option* opt_gamma = nullptr;
    CLI::Option* opt_lambda = nullptr;
    CLI::Option* opt_w = nullptr;

    void add_config(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; flags win over file keys");
    }
    void add_prior(CLI::App* cmd) {
        opt_prior = cmd->add_option("--prior", prior_kind,
                                    "bernoulli | bernoulli_rademacher | gaussian");
        opt_rho = cmd->add_option("--rho", rho, "sparsity in (0, 1]");
    }
    void add_quad(CLI::App* cmd) {
        cmd->add_option("--quad-nodes", quad_nodes, "quadrature node count (>= 16)");
        cmd->add_option("--quad-half-width", quad_half_width,
                        "integration window half-width in std deviations (>= 6)");
    }
    void add_threads(CLI::App* cmd) {
        cmd->add_option("--threads", threads, "worker pool size; 0 = hardware");
    }
    void add_snr_grid(CLI::App* cmd) {
        opt_gamma = cmd->add_option("--gamma", gamma_text,
                                    "gamma grid 'min:max:points[:log]' "
                                    "(lambda = 4 gamma |ln rho| / rho)");
        opt_lambda = cmd->add_option("--lambda", lambda_text, "lambda grid, raw SNR");
        opt_w = cmd->add_option("--w", w_text, "w grid (lambda = w / rho^2)");
    }

    json merge_all(bool want_snr) {
        json cfg = json::object();
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (cfg.contains("prior") && cfg["prior"].is_object()) {
            const json p = cfg["prior"];
            cfg.erase("prior");
            if (p.contains("kind")) cfg["prior"] = p.at("kind");
            if (p.contains("rho") && !cfg.contains("rho")) cfg["rho"] = p.at("rho");
        }
        if (cfg.contains("quad") && cfg["quad"].is_object()) {
            const json q = cfg["quad"];
            cfg.erase("quad");
            if (q.contains("nodes")) cfg["quad.nodes"] = q.at("nodes");
            if (q.contains("half_width")) cfg["quad.half_width"] = q.at("half_width");
        }
        merge(opt_prior, cfg, "prior", prior_kind);
        merge(opt_rho, cfg, "rho", rho);
        merge(nullptr, cfg, "quad.nodes", quad_nodes);
        merge(nullptr, cfg, "quad.half_width", quad_half_width);
        merge(nullptr, cfg, "threads", threads);
        if (want_snr) {
            merge(opt_gamma, cfg, "gamma", gamma_text);
            merge(opt_lambda, cfg, "lambda", lambda_text);
            merge(opt_w, cfg, "w", w_text);
        }
        return cfg;
    }

    QuadratureSpec quad() const {
        QuadratureSpec spec;
        spec.node_count = quad_nodes;
        spec.half_width = quad_half_width;
        validate(spec);
        return spec;
    }

    Prior prior() const { return Prior::from_config(prior_kind, rho); }

    // Exactly one of gamma/lambda/w must be supplied; returns lambdas.
    std::vector<double> lambda_grid(const json& cfg, json& echo) const {
        int given = 0;
        for (const std::string* t : {&gamma_text, &lambda_text, &w_text})
            if (!t->empty()) ++given;
        (void)cfg;
        if (given != 1)
            throw ConfigError("exactly one of --gamma, --lambda, --w must be supplied");
        std::vector<double> lambdas;
        if (!gamma_text.empty()) {
            echo["gamma"] = gamma_text;
            for (double g : GridSpec::parse(gamma_text).values())
                lambdas.push_back(lambda_from_gamma(g, rho));
        } else if (!lambda_text.empty()) {
            echo["lambda"] = lambda_text;
            lambdas = GridSpec::parse(lambda_text).values();
        } else {
            echo["w"] = w_text;
            for (double w : GridSpec::parse(w_text).values())
                lambdas.push_back(lambda_from_w(w, rho));
        }
        if (lambdas.empty()) throw ConfigError("empty SNR grid");
        return lambdas;
    }
};

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

void write_csv_header(std::ofstream& out, const std::string& subcommand, const json& echo) {
    out << "# spikelab " << version() << " " << subcommand << " config=" << echo.dump()
        << "\n";
}

void write_json_report(const std::string& path, const json& doc) {
    if (path.empty()) {
        std::cout << doc.dump(2) << std::endl;
        return;
    }
    std::ofstream out = open_output(path);
    out << doc.dump(2) << "\n";
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- potential

int run_potential_curve(CommonOpts& opts, const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    json echo{{"subcommand", "potential-curve"}, {"prior", opts.prior_kind},
              {"rho", opts.rho}, {"quad.nodes", opts.quad_nodes},
              {"quad.half_width", opts.quad_half_width}};
    json cfg;
    const std::vector<double> lambdas = opts.lambda_grid(cfg, echo);
    std::vector<double> gammas;
    gammas.reserve(lambdas.size());
    for (double l : lambdas) gammas.push_back(gamma_from_lambda(l, opts.rho));

    const PotentialCurve curve =
        mmse_curve(opts.prior(), gammas, opts.rho, opts.quad(), opts.threads);

    std::ofstream out = open_output(out_path);
    write_csv_header(out, "potential-curve", echo);
    out << "gamma,lambda,rho,q_star,i_pot_min,mi_rescaled,mmse_matrix_norm\n";
    for (const PotentialPoint& p : curve.rows) {
        out << fmt17(p.gamma) << ',' << fmt17(p.lambda) << ',' << fmt17(opts.rho) << ','
            << fmt17(p.q_star) << ',' << fmt17(p.i_pot_min) << ',' << fmt17(p.mi_rescaled)
            << ',' << fmt17(p.mmse_matrix_norm) << '\n';
    }
    std::cerr << "potential-curve: " << curve.rows.size() << " rows in "
              << elapsed_since(t0) << " s\n";
    return kExitOk;
}

// ----------------------------------------------------------------- se-curve

int run_se_curve(CommonOpts& opts, const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    json echo{{"subcommand", "se-curve"}, {"prior", opts.prior_kind}, {"rho", opts.rho},
              {"quad.nodes", opts.quad_nodes}, {"quad.half_width", opts.quad_half_width}};
    json cfg;
    const std::vector<double> lambdas = opts.lambda_grid(cfg, echo);

    const std::vector<SeCurvePoint> rows =
        amp_mse_curve(opts.prior(), lambdas, opts.quad(), opts.threads);

    std::ofstream out = open_output(out_path);
    write_csv_header(out, "se-curve", echo);
    out << "lambda,w,tau_inf,tau_over_rho,vector_mse_norm,matrix_mse_norm,iterations\n";
    for (const SeCurvePoint& p : rows) {
        out << fmt17(p.lambda) << ',' << fmt17(p.w) << ',' << fmt17(p.tau_inf) << ','
            << fmt17(p.tau_over_rho) << ',' << fmt17(p.vector_mse_norm) << ','
            << fmt17(p.matrix_mse_norm) << ',' << p.iterations << '\n';
    }
    std::cerr << "se-curve: " << rows.size() << " rows in " << elapsed_since(t0) << " s\n";
    return kExitOk;
}

// ------------------------------------------------------------------ amp-run

int run_amp(CommonOpts& opts, const json& cfg, int n, int seeds, std::uint64_t seed_base,
            int t_max, const std::string& init_kind, double eps,
            const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    json echo{{"subcommand", "amp-run"}, {"prior", opts.prior_kind}, {"rho", opts.rho},
              {"n", n}, {"seeds", seeds}, {"seed_base", seed_base}, {"t_max", t_max},
              {"init", init_kind}, {"quad.nodes", opts.quad_nodes},
              {"quad.half_width", opts.quad_half_width}};
    json cfg_copy = cfg;
    const std::vector<double> lambdas = opts.lambda_grid(cfg_copy, echo);
    if (lambdas.size() != 1)
        throw ConfigError("amp-run expects a single SNR value, not a grid");
    const double lambda = lambdas[0];
    if (n < 2) throw ConfigError("amp-run needs --n >= 2");
    if (seeds < 1) throw ConfigError("amp-run needs --seeds >= 1");
    if (init_kind != "ones" && init_kind != "side_info")
        throw ConfigError("amp-run --init must be 'ones' or 'side_info'");
    if (init_kind == "side_info") echo["eps"] = eps;

    const Prior prior = opts.prior();
    const QuadratureSpec quad = opts.quad();
    AmpOptions amp_opts;
    amp_opts.t_max = t_max;

    std::filesystem::create_directories(out_dir);
    json results = json::array();
    std::vector<json> slots(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), opts.threads, [&](std::size_t k) {
        const std::uint64_t seed = seed_base + k;
        const Instance inst = generate_instance(prior, n, lambda, seed);
        const AmpInit init = init_kind == "ones" ? AmpInit::ones()
                                                 : AmpInit::side_info(eps, seed);
        const AmpTrajectory traj = amp_run(inst, init, amp_opts, quad);

        const std::string traj_path =
            (std::filesystem::path(out_dir) / ("trajectory_seed" + std::to_string(seed) + ".csv"))
                .string();
        std::ofstream out = open_output(traj_path);
        json traj_echo = echo;
        traj_echo["seed"] = seed;
        write_csv_header(out, "amp-run", traj_echo);
        out << "t,overlap,onsager,vector_mse_norm,matrix_mse_norm,se_tau\n";
        for (const AmpRecord& r : traj.records) {
            out << r.t << ',' << fmt17(r.overlap) << ',' << fmt17(r.onsager) << ','
                << fmt17(r.vector_mse_norm) << ',' << fmt17(r.matrix_mse_norm) << ','
                << fmt17(r.se_tau) << '\n';
        }

        const AmpRecord& last = traj.records.back();
        const double rho = prior.second_moment();
        const double ratio = last.se_tau / rho;
        slots[k] = json{{"seed", seed},
                        {"iterations", last.t},
                        {"final_overlap", last.overlap},
                        {"final_vector_mse_norm", last.vector_mse_norm},
                        {"final_matrix_mse_norm", last.matrix_mse_norm},
                        {"se_tau", last.se_tau},
                        {"se_vector_prediction", 1.0 - ratio},
                        {"se_matrix_prediction", 1.0 - ratio * ratio}};
    });
    for (json& s : slots) results.push_back(std::move(s));

    echo["lambda_value"] = lambda;
    const json summary{{"config", echo},
                       {"results", results},
                       {"version", version()},
                       {"elapsed_seconds", elapsed_since(t0)}};
    std::ofstream out = open_output((std::filesystem::path(out_dir) / "summary.json").string());
    out << summary.dump(2) << "\n";
    std::cerr << "amp-run: " << seeds << " seeds in " << elapsed_since(t0) << " s\n";
    return kExitOk;
}

// ------------------------------------------------------------ wishart-curve

int run_wishart_curve(CommonOpts& opts, const json& cfg, std::string prior_u_kind,
                      double rho_u, std::string prior_v_kind, double rho_v, double alpha,
                      const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const Prior prior_u = Prior::from_config(prior_u_kind, rho_u);
    const Prior prior_v = Prior::from_config(prior_v_kind, rho_v);
    if (!prior_v.discrete()) throw ConfigError("wishart-curve: prior V must be discrete");

    json echo{{"subcommand", "wishart-curve"}, {"prior_u", prior_u_kind},
              {"rho_u", rho_u}, {"prior_v", prior_v_kind}, {"rho_v", rho_v},
              {"alpha", alpha}, {"quad.nodes", opts.quad_nodes},
              {"quad.half_width", opts.quad_half_width}};

    std::vector<double> lambdas;
    if (!opts.gamma_text.empty()) {
        echo["gamma"] = opts.gamma_text;
        for (double g : GridSpec::parse(opts.gamma_text).values())
            lambdas.push_back(wishart_lambda_from_gamma(g, alpha, rho_v));
    } else if (!opts.lambda_text.empty()) {
        echo["lambda"] = opts.lambda_text;
        lambdas = GridSpec::parse(opts.lambda_text).values();
    } else {
        throw ConfigError("wishart-curve needs --gamma or --lambda");
    }
    (void)cfg;

    WishartParams base{prior_u, prior_v, alpha, 0.0};
    const std::vector<WishartMmsePoint> rows =
        wishart_mmse(base, lambdas, opts.quad(), opts.threads);

    std::ofstream out = open_output(out_path);
    write_csv_header(out, "wishart-curve", echo);
    out << "lambda,gamma_v,q_u_star,q_v_star,value,mmse_vv_norm,mmse_uu_norm,mmse_uv_norm\n";
    for (const WishartMmsePoint& p : rows) {
        out << fmt17(p.lambda) << ',' << fmt17(p.gamma_v) << ',' << fmt17(p.q_u_star) << ','
            << fmt17(p.q_v_star) << ',' << fmt17(p.value) << ',' << fmt17(p.mmse_vv_norm)
            << ',' << fmt17(p.mmse_uu_norm) << ',' << fmt17(p.mmse_uv_norm) << '\n';
    }
    std::cerr << "wishart-curve: " << rows.size() << " rows in " << elapsed_since(t0)
              << " s\n";
    return kExitOk;
}

// ---------------------------------------------------------------- threshold

int run_threshold(CommonOpts& opts, const std::string& kind, double alpha,
                  const std::string& prior_u_kind, const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    json doc{{"version", version()}};
    json cfg_echo{{"subcommand", "threshold"}, {"kind", kind}, {"rho", opts.rho},
                  {"prior", opts.prior_kind}};
    if (kind == "statistical") {
        const StatThreshold thr = statistical_threshold(opts.prior(), opts.rho, opts.quad());
        doc["lambda_c"] = thr.lambda_c;
        doc["normalized"] = thr.gamma_c;  // lambda_c rho / (4 |ln rho|)
        doc["reference_lambda"] = lambda_from_gamma(1.0, opts.rho);
    } else if (kind == "algorithmic") {
        const AlgThreshold thr = algorithmic_threshold(opts.prior(), opts.rho, opts.quad());
        doc["lambda_amp"] = thr.lambda_amp;
        doc["w_star"] = thr.w_star;
    } else if (kind == "wishart-v") {
        cfg_echo["prior_u"] = prior_u_kind;
        cfg_echo["alpha"] = alpha;
        const Prior prior_u = Prior::from_config(prior_u_kind, 1.0);
        WishartParams base{prior_u, opts.prior(), alpha, 0.0};
        const WishartThreshold thr = wishart_v_threshold(base, opts.quad());
        doc["lambda_star"] = thr.lambda_star;
        doc["normalized"] = thr.gamma_star;
    } else {
        throw ConfigError("threshold --kind must be statistical, algorithmic or wishart-v");
    }
    doc["config"] = cfg_echo;
    doc["elapsed_seconds"] = elapsed_since(t0);
    write_json_report(out_path, doc);
    return kExitOk;
}

// ----------------------------------------------------------------- validate

struct CheckRow {
    std::string check;
    double value = 0.0;
    double std_error = 0.0;
    bool pass = false;
};

int run_validate(CommonOpts& opts, const std::string& level, std::uint64_t seed,
                 const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    if (level != "quick" && level != "full")
        throw ConfigError("validate --level must be 'quick' or 'full'");
    const bool full = level == "full";
    const QuadratureSpec quad = opts.quad();
    const NormalQuadrature grid(quad);
    std::vector<CheckRow> rows;

    {  // Nishimori residuals, exact posterior at n = 6
        const int samples = full ? 10000 : 2000;
        const NishimoriReport rep =
            check_nishimori(Prior::bernoulli(0.3), 6, 1.0, samples, seed);
        rows.push_back({"nishimori_mean_residual", rep.mean_residual.estimate,
                        rep.mean_residual.std_error,
                        std::abs(rep.mean_residual.estimate) <=
                            3.0 * rep.mean_residual.std_error});
        rows.push_back({"nishimori_overlap_residual", rep.overlap_residual.estimate,
                        rep.overlap_residual.std_error,
                        std::abs(rep.overlap_residual.estimate) <=
                            3.0 * rep.overlap_residual.std_error});
    }

    {  // I-MMSE on the exact small-n ensemble
        const int n = full ? 8 : 6;
        const int samples = full ? 20000 : 3000;
        const ImmseReport rep =
            check_immse(Prior::bernoulli(0.3), n, 2.0, 0.05, samples, seed + 1);
        rows.push_back({"oracle_immse_gap", rep.fd_derivative - rep.half_pair_mmse,
                        rep.combined_std_error, rep.pass()});
    }

    {  // scalar-channel I-MMSE on a 20-point gamma grid
        const Prior prior = Prior::bernoulli(0.2);
        double max_rel = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double gamma = 0.05 * std::pow(50.0 / 0.05, i / 19.0);
            const double h = 1e-4 * std::max(1.0, gamma);
            const double fd =
                (mutual_info(prior, gamma + h, grid) - mutual_info(prior, gamma - h, grid)) /
                (2.0 * h);
            const double mm = mmse(prior, gamma, grid);
            max_rel = std::max(max_rel, std::abs(2.0 * fd - mm) / mm);
        }
        rows.push_back({"scalar_immse_max_rel_err", max_rel, 0.0, max_rel <= 1e-5});
    }

    {  // potential stationarity off-threshold
        const double rho = 1e-4;
        const Prior prior = Prior::bernoulli(rho);
        double worst = 0.0;
        for (double gamma : {0.5, 2.0}) {
            const MinimizeResult m =
                minimize_potential(prior, lambda_from_gamma(gamma, rho), rho, quad);
            if (!m.at_boundary) worst = std::max(worst, m.stationarity_residual);
        }
        rows.push_back({"potential_stationarity_residual", worst, 0.0, worst <= 1e-8});
    }

    {  // matrix-MMSE decomposition identity on exact tables
        const int n = full ? 6 : 5;
        const int samples = full ? 500 : 200;
        const Prior prior = Prior::bernoulli(0.3);
        double worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            const Instance inst =
                generate_instance(prior, n, 1.0, derive_seed(seed + 2, s));
            const PosteriorTable table = exact_posterior(inst);
            double direct = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double d = inst.X[i] * inst.X[j] - table.pair_means(i, j);
                    direct += d * d;
                }
            const double x2 = inst.X.squaredNorm();
            const double decomposed = x2 * x2 -
                                      2.0 * posterior_overlap_sq(table, inst.X) * n * n +
                                      table.pair_means.squaredNorm();
            worst = std::max(worst, std::abs(direct - decomposed) / (1.0 + std::abs(direct)));
        }
        rows.push_back({"matrix_mmse_identity", worst, 0.0, worst <= 1e-12});
    }

    {  // Bernoulli closed-form potential vs generic quadrature route
        double worst = 0.0;
        const RngStream rnd{seed + 3, 0};
        for (int i = 0; i < (full ? 40 : 12); ++i) {
            const double rho = 0.01 + 0.4 * rnd.uniform(i, 1);
            const double gamma = 0.2 + 2.5 * rnd.uniform(i, 2);
            const double q = rho * rnd.uniform(i, 3);
            const double lambda = lambda_from_gamma(gamma, rho);
            const double generic =
                potential_value(Prior::bernoulli(rho), q, lambda, rho, quad);
            const double closed = potential_value_bernoulli(q, lambda, rho, quad);
            worst = std::max(worst, std::abs(generic - closed));
        }
        rows.push_back({"bernoulli_potential_closed_form", worst, 0.0, worst <= 1e-10});
    }

    {  // Bernoulli closed-form SE step vs generic E[f^2] route
        double worst = 0.0;
        const RngStream rnd{seed + 4, 0};
        for (int i = 0; i < (full ? 40 : 12); ++i) {
            const double rho = 0.01 + 0.4 * rnd.uniform(i, 1);
            const double tau = rho * rho + (rho - rho * rho) * rnd.uniform(i, 2);
            const double lambda = (0.05 + 2.0 * rnd.uniform(i, 3)) / (rho * rho);
            const double closed = se_step_bernoulli(lambda, rho, tau, grid);
            const double generic =
                mean_square_denoise(Prior::bernoulli(rho), std::sqrt(lambda) * tau, tau, grid);
            worst = std::max(worst, std::abs(generic - closed));
        }
        rows.push_back({"bernoulli_se_closed_form", worst, 0.0, worst <= 1e-10});
    }

    bool all_pass = true;
    json results = json::array();
    for (const CheckRow& r : rows) {
        all_pass = all_pass && r.pass;
        results.push_back({{"check", r.check}, {"value", r.value},
                           {"std_error", r.std_error}, {"pass", r.pass}});
    }
    const json doc{{"config", {{"subcommand", "validate"}, {"level", level}, {"seed", seed}}},
                   {"results", results},
                   {"version", version()},
                   {"elapsed_seconds", elapsed_since(t0)}};
    write_json_report(out_path, doc);
    return all_pass ? kExitOk : kExitValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("spikelab");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
    CLI::App app{"sparse spiked matrix phase transitions: potential, state evolution, AMP"};
    app.require_subcommand(1);

    CommonOpts pot_opts, se_opts, amp_opts, wis_opts, thr_opts, val_opts;
    std::string pot_out, se_out, wis_out;
    std::string thr_out, val_out;

    // potential-curve
    CLI::App* pot = app.add_subcommand(
        "potential-curve", "rescaled mutual information / MMSE curve from the potential");
    pot_opts.add_config(pot);
    pot_opts.add_prior(pot);
    pot_opts.add_snr_grid(pot);
    pot_opts.add_quad(pot);
    pot_opts.add_threads(pot);
    CLI::Option* pot_out_opt = pot->add_option("--out", pot_out, "output CSV path");

    // se-curve
    CLI::App* se = app.add_subcommand("se-curve",
                                      "state-evolution fixed points and predicted AMP MSE");
    se_opts.add_config(se);
    se_opts.add_prior(se);
    se_opts.add_snr_grid(se);
    se_opts.add_quad(se);
    se_opts.add_threads(se);
    CLI::Option* se_out_opt = se->add_option("--out", se_out, "output CSV path");

    // amp-run
    CLI::App* amp = app.add_subcommand("amp-run", "finite-n AMP against SE predictions");
    int amp_n = 0, amp_seeds = 1, amp_tmax = 200;
    std::uint64_t amp_seed_base = 1;
    std::string amp_init = "ones", amp_out_dir;
    double amp_eps = 0.1;
    amp_opts.add_config(amp);
    amp_opts.add_prior(amp);
    amp_opts.add_snr_grid(amp);
    amp_opts.add_quad(amp);
    amp_opts.add_threads(amp);
    CLI::Option* amp_n_opt = amp->add_option("--n", amp_n, "instance size");
    amp->add_option("--seeds", amp_seeds, "number of seeds");
    amp->add_option("--seed-base", amp_seed_base, "first seed value");
    amp->add_option("--t-max", amp_tmax, "iteration budget");
    amp->add_option("--init", amp_init, "ones | side_info");
    amp->add_option("--eps", amp_eps, "side-information strength");
    CLI::Option* amp_out_opt = amp->add_option("--out-dir", amp_out_dir, "output directory");

    // wishart-curve
    CLI::App* wis = app.add_subcommand("wishart-curve",
                                       "inf-sup solution and MMSE triple for the spiked "
                                       "Wishart model");
    std::string wis_prior_u = "gaussian", wis_prior_v = "bernoulli_rademacher";
    double wis_rho_u = 1.0, wis_rho_v = 1e-4, wis_alpha = 1.0;
    wis_opts.add_config(wis);
    wis_opts.add_snr_grid(wis);
    wis_opts.add_quad(wis);
    wis_opts.add_threads(wis);
    wis->add_option("--prior-u", wis_prior_u, "U prior kind");
    wis->add_option("--rho-u", wis_rho_u, "U sparsity");
    wis->add_option("--prior-v", wis_prior_v, "V prior kind");
    wis->add_option("--rho-v", wis_rho_v, "V sparsity");
    wis->add_option("--alpha", wis_alpha, "aspect ratio m/n");
    CLI::Option* wis_out_opt = wis->add_option("--out", wis_out, "output CSV path");

    // threshold
    CLI::App* thr = app.add_subcommand("threshold",
                                       "statistical or algorithmic threshold location");
    std::string thr_kind = "statistical", thr_prior_u = "gaussian";
    double thr_alpha = 1.0;
    thr_opts.add_config(thr);
    thr_opts.add_prior(thr);
    thr_opts.add_quad(thr);
    thr->add_option("--kind", thr_kind, "statistical | algorithmic | wishart-v");
    thr->add_option("--alpha", thr_alpha, "aspect ratio (wishart-v)");
    thr->add_option("--prior-u", thr_prior_u, "U prior kind (wishart-v)");
    thr->add_option("--out", thr_out, "output JSON path (stdout if omitted)");

    // validate
    CLI::App* val = app.add_subcommand("validate", "oracle identity checks; exit 1 on failure");
    std::string val_level = "quick";
    std::uint64_t val_seed = 42;
    val_opts.add_config(val);
    val_opts.add_quad(val);
    val->add_option("--level", val_level, "quick | full");
    val->add_option("--seed", val_seed, "Monte Carlo seed");
    val->add_option("--out", val_out, "output JSON path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << app.help() << std::flush;
        return kExitConfigError;
    }

    try {
        if (pot->parsed()) {
            const json cfg = pot_opts.merge_all(true);
            merge(pot_out_opt, cfg, "out", pot_out);
            if (pot_out.empty()) throw ConfigError("potential-curve needs --out");
            return run_potential_curve(pot_opts, pot_out);
        }
        if (se->parsed()) {
            const json cfg = se_opts.merge_all(true);
            merge(se_out_opt, cfg, "out", se_out);
            if (se_out.empty()) throw ConfigError("se-curve needs --out");
            return run_se_curve(se_opts, se_out);
        }
        if (amp->parsed()) {
            const json cfg = amp_opts.merge_all(true);
            merge(amp_n_opt, cfg, "n", amp_n);
            merge(nullptr, cfg, "seeds", amp_seeds);
            merge(nullptr, cfg, "seed_base", amp_seed_base);
            merge(nullptr, cfg, "t_max", amp_tmax);
            merge(nullptr, cfg, "init", amp_init);
            merge(nullptr, cfg, "eps", amp_eps);
            merge(amp_out_opt, cfg, "out_dir", amp_out_dir);
            if (!provided(amp_n_opt, cfg, "n")) throw ConfigError("amp-run needs --n");
            if (amp_out_dir.empty()) throw ConfigError("amp-run needs --out-dir");
            return run_amp(amp_opts, cfg, amp_n, amp_seeds, amp_seed_base, amp_tmax,
                           amp_init, amp_eps, amp_out_dir);
        }
        if (wis->parsed()) {
            const json cfg = wis_opts.merge_all(true);
            merge(nullptr, cfg, "prior_u", wis_prior_u);
            merge(nullptr, cfg, "rho_u", wis_rho_u);
            merge(nullptr, cfg, "prior_v", wis_prior_v);
            merge(nullptr, cfg, "rho_v", wis_rho_v);
            merge(nullptr, cfg, "alpha", wis_alpha);
            merge(wis_out_opt, cfg, "out", wis_out);
            if (wis_out.empty()) throw ConfigError("wishart-curve needs --out");
            return run_wishart_curve(wis_opts, cfg, wis_prior_u, wis_rho_u, wis_prior_v,
                                     wis_rho_v, wis_alpha, wis_out);
        }
        if (thr->parsed()) {
            const json cfg = thr_opts.merge_all(false);
            merge(nullptr, cfg, "kind", thr_kind);
            merge(nullptr, cfg, "alpha", thr_alpha);
            merge(nullptr, cfg, "prior_u", thr_prior_u);
            merge(nullptr, cfg, "out", thr_out);
            return run_threshold(thr_opts, thr_kind, thr_alpha, thr_prior_u, thr_out);
        }
        if (val->parsed()) {
            const json cfg = val_opts.merge_all(false);
            merge(nullptr, cfg, "level", val_level);
            merge(nullptr, cfg, "seed", val_seed);
            merge(nullptr, cfg, "out", val_out);
            return run_validate(val_opts, val_level, val_seed, val_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
    return kExitConfigError;
}

}  // namespace spikelab::cli
