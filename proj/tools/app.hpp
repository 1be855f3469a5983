#pragma once

// Command-line front end: configuration, commands and experiments. Commands
// return the JSON report; run() wraps them with argument parsing, output
// routing and the error object.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smkl/datagen.hpp"

namespace smkl::app {

using nlohmann::json;

enum class Algorithm { l2_greedy, l1_greedy, two_stage, oracle };

std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view name);

struct RunConfig {
    std::string command;
    std::string data;
    std::string format = "csv";
    std::string kernels;
    Algorithm algorithm = Algorithm::l2_greedy;
    std::size_t d = 5;
    std::optional<double> lambda;
    std::uint64_t seed = 0;
    int threads = 0;  ///< 0 keeps the OpenMP default
    std::string out;
    double holdout = 0.0;
    double step_scale = 1.0;
    double grad_tol = 1e-12;
    double inner_tol = 1e-8;
    std::size_t inner_max_iter = 10000;
    std::string experiment;
    std::size_t samples = 1000;
    std::vector<double> mu_grid{1.5, 2.0, 3.0, 5.0};
    std::optional<double> a;
    std::optional<double> r;
    std::optional<double> epsilon_star;
    std::optional<double> planted_rate;
    std::size_t reps = 20;
    std::vector<std::size_t> d_grid;
    std::optional<double> lambda_fraction;

    // Synthetic instance (gen-data and experiments); unset fields take the
    // consumer's default.
    std::optional<std::string> structure;
    std::optional<std::size_t> n;
    std::optional<std::size_t> m;
    std::optional<std::size_t> support;
    std::optional<double> noise;

    /// Instance spec with unset fields filled from `defaults`.
    datagen::SyntheticSpec synthetic(const datagen::SyntheticSpec& defaults) const;

    void validate() const;
    json to_json() const;
};

/// Dataset plus bank ready for a solver; holdout rows are sliced out of
/// Grams built over every sample.
struct Problem {
    std::vector<KernelSpec> specs;
    KernelBank bank;
    Vector y;
    std::vector<Matrix> holdout_cross;       ///< per kernel, test x train
    Vector holdout_y;
    datagen::Split split;
};

Problem load_problem(const RunConfig& cfg);

json cmd_solve(const RunConfig& cfg);
json cmd_diagnose(const RunConfig& cfg);
json cmd_experiment(const RunConfig& cfg);
json cmd_gen_data(const RunConfig& cfg);

/// Experiments; each report carries a boolean "pass".
json experiment_counterexample(std::uint64_t seed);
json experiment_rate_check(const RunConfig& cfg);
json experiment_theorem1_check(const RunConfig& cfg);

json error_object(std::string_view kind, std::string_view message);

/// Full CLI; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smkl::app
