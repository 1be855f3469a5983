#include "app.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "report.hpp"
#include "smkl/error.hpp"
#include "smkl/parallel.hpp"

namespace smkl::app {

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::l2_greedy: return "l2_greedy";
        case Algorithm::l1_greedy: return "l1_greedy";
        case Algorithm::two_stage: return "two_stage";
        case Algorithm::oracle: return "oracle";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::l2_greedy, Algorithm::l1_greedy, Algorithm::two_stage, Algorithm::oracle}) {
        if (name == to_string(a)) return a;
    }
    fail(ErrorKind::validation,
         "unknown algorithm '" + std::string(name) + "' (expected l2_greedy, l1_greedy, two_stage or oracle)");
}

void RunConfig::validate() const {
    require(d >= 1, ErrorKind::validation, "--d must be >= 1");
    require(holdout >= 0.0 && holdout < 1.0, ErrorKind::validation, "--holdout must lie in [0, 1)");
    require(samples >= 1, ErrorKind::validation, "--samples must be >= 1");
    require(threads >= 0, ErrorKind::validation, "--threads must be >= 0");
    require(!lambda || *lambda > 0.0, ErrorKind::validation, "--lambda must be > 0");
    require(step_scale > 0.0 && step_scale <= 1.0, ErrorKind::validation, "--step-scale must lie in (0, 1]");
    require(inner_tol > 0.0, ErrorKind::validation, "--inner-tol must be > 0");
    datagen::parse_format(format);
    if (command == "solve" && (algorithm == Algorithm::l1_greedy || algorithm == Algorithm::two_stage)) {
        require(lambda.has_value(), ErrorKind::validation,
                "--lambda is required for algorithm " + std::string(to_string(algorithm)));
    }
    if (command == "experiment") {
        require(!experiment.empty(), ErrorKind::validation, "--experiment is required");
    }
}

datagen::SyntheticSpec RunConfig::synthetic(const datagen::SyntheticSpec& defaults) const {
    datagen::SyntheticSpec s = defaults;
    if (structure) s.structure = datagen::parse_structure(*structure);
    if (n) s.n_samples = *n;
    if (m) s.n_kernels = *m;
    if (support) s.true_support_size = *support;
    if (noise) s.noise_std = *noise;
    s.seed = seed;
    s.validate();
    return s;
}

json RunConfig::to_json() const {
    auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    return {{"data", data},
            {"format", format},
            {"kernels", kernels},
            {"algo", to_string(algorithm)},
            {"d", d},
            {"lambda", opt(lambda)},
            {"seed", seed},
            {"threads", threads},
            {"out", out},
            {"holdout", holdout},
            {"step_scale", step_scale},
            {"grad_tol", grad_tol},
            {"inner_tol", inner_tol},
            {"inner_max_iter", inner_max_iter},
            {"experiment", experiment},
            {"samples", samples},
            {"mu_grid", mu_grid},
            {"A", opt(a)},
            {"R", opt(r)},
            {"epsilon_star", opt(epsilon_star)},
            {"planted_rate", opt(planted_rate)},
            {"reps", reps},
            {"d_grid", d_grid},
            {"lambda_fraction", opt(lambda_fraction)},
            {"structure", opt(structure)},
            {"n", opt(n)},
            {"m", opt(m)},
            {"support", opt(support)},
            {"noise", opt(noise)}};
}

json error_object(std::string_view kind, std::string_view message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

namespace {

template <typename T>
void optional_option(CLI::App& app, const std::string& name, std::optional<T>& target, const std::string& help) {
    app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

void emit(const json& report, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string text = report.dump(2) + "\n";
    if (cfg.out.empty() || cfg.command == "gen-data") {
        out << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (f << text) return;
    err << "smkl: cannot write report to " << cfg.out << "\n";
    out << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse multiple kernel learning: greedy solvers, oracles and diagnostics"};
    app.name("smkl");
    RunConfig cfg;
    std::string algo = "l2_greedy";

    app.set_config("--config", "", "Configuration file, one 'key = value' per line, '#' comments");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("--data", cfg.data, "Dataset path");
    app.add_option("--format", cfg.format, "Dataset format: csv or sparse_labeled");
    app.add_option("--kernels", cfg.kernels, "Kernel specs: a spec file or an inline ';'-separated list");
    app.add_option("--algo", algo, "l2_greedy, l1_greedy, two_stage or oracle");
    app.add_option("--d", cfg.d, "Iteration budget / support size");
    optional_option(app, "--lambda", cfg.lambda, "Regularization weight (l1_greedy, two_stage)");
    app.add_option("--seed", cfg.seed, "Seed for holdout splits, probes and synthetic data");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = OpenMP default)");
    app.add_option("--out", cfg.out, "Report path (gen-data: output prefix)");
    app.add_option("--holdout", cfg.holdout, "Holdout fraction in [0, 1)");
    app.add_option("--step-scale", cfg.step_scale, "Algorithm 2 step scale in (0, 1]");
    app.add_option("--grad-tol", cfg.grad_tol, "Algorithm 2 gradient stopping tolerance");
    app.add_option("--inner-tol", cfg.inner_tol, "Inner group-lasso stationarity tolerance");
    app.add_option("--inner-max-iter", cfg.inner_max_iter, "Inner group-lasso sweep budget");
    app.add_option("--experiment", cfg.experiment, "counterexample, rate_check or theorem1_check");
    app.add_option("--samples", cfg.samples, "gamma probe sample count");
    app.add_option("--mu-grid", cfg.mu_grid, "mu values for tau")->delimiter(',');
    optional_option(app, "--A", cfg.a, "Confidence exponent A for gen_bound");
    optional_option(app, "--R", cfg.r, "Label bound R for gen_bound");
    optional_option(app, "--epsilon-star", cfg.epsilon_star, "Use this epsilon* instead of the oracle");
    optional_option(app, "--planted-rate", cfg.planted_rate, "rate_check on an exact geometric sequence");
    app.add_option("--reps", cfg.reps, "Repetitions (theorem1_check) or planted sequence length");
    app.add_option("--d-grid", cfg.d_grid, "d values for theorem1_check")->delimiter(',');
    optional_option(app, "--lambda-fraction", cfg.lambda_fraction,
                    "theorem1_check lambda as a fraction of the largest initial gradient");
    optional_option(app, "--structure", cfg.structure,
                    "orthogonal_ranges, random_rbf_bank or duplicate_counterexample");
    optional_option(app, "--n", cfg.n, "Synthetic sample count");
    optional_option(app, "--m", cfg.m, "Synthetic kernel count");
    optional_option(app, "--support", cfg.support, "Synthetic planted support size");
    optional_option(app, "--noise", cfg.noise, "Synthetic label noise standard deviation");

    app.add_subcommand("solve", "Run a solver and report the trace and fit")->fallthrough();
    app.add_subcommand("diagnose", "Dependence constants and bounds for a kernel bank")->fallthrough();
    app.add_subcommand("experiment", "Named experiments with a pass/fail verdict")->fallthrough();
    app.add_subcommand("gen-data", "Write a synthetic dataset, kernel specs and ground truth")->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        out << error_object("usage", e.what()).dump(2) << "\n";
        err << "smkl: " << e.what() << "\n";
        return 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        cfg.algorithm = parse_algorithm(algo);
        if (cfg.threads > 0) set_num_threads(cfg.threads);
        json report;
        if (cfg.command == "solve") report = cmd_solve(cfg);
        else if (cfg.command == "diagnose") report = cmd_diagnose(cfg);
        else if (cfg.command == "experiment") report = cmd_experiment(cfg);
        else report = cmd_gen_data(cfg);
        emit(report, cfg, out, err);
        return 0;
    } catch (const Error& e) {
        emit(error_object(to_string(e.kind()), e.what()), cfg, out, err);
        err << "smkl: " << to_string(e.kind()) << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        emit(error_object("internal", e.what()), cfg, out, err);
        err << "smkl: internal: " << e.what() << "\n";
    }
    return 1;
}

}  // namespace smkl::app
