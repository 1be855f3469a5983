#include <algorithm>
#include <cmath>

#include "app.hpp"
#include "report.hpp"
#include "smkl/diagnostics.hpp"
#include "smkl/error.hpp"
#include "smkl/oracles.hpp"
#include "smkl/solver_l1.hpp"
#include "smkl/solver_l2.hpp"

namespace smkl::app {

namespace {

constexpr double kRateR2Threshold = 0.95;
constexpr double kRateFloorSlack = 1e-6;
constexpr double kDefaultLambdaFraction = 0.1;

json scenario_json(const oracles::CounterexampleScenario& s) {
    return {{"n_kernels", s.n_kernels},
            {"full_norms", s.full_norms},
            {"two_stage_pick", s.two_stage_pick},
            {"alg2_pick", s.alg2_pick}};
}

datagen::SyntheticSpec gap_check_defaults() {
    datagen::SyntheticSpec s;
    s.n_samples = 80;
    s.n_kernels = 10;
    s.true_support_size = 3;
    s.noise_std = 0.1;
    s.structure = datagen::Structure::random_rbf_bank;
    return s;
}

}  // namespace

json experiment_counterexample(std::uint64_t seed) {
    const auto r = oracles::counterexample_harness(seed);
    return {{"seed", r.seed},
            {"lambda", r.lambda},
            {"b1", r.b1},
            {"b2", r.b2},
            {"norm_ratio", r.norm_ratio},
            {"scenario_a", scenario_json(r.a)},
            {"scenario_b", scenario_json(r.b)},
            {"scenario_a_pick", r.scenario_a_pick},
            {"scenario_b_pick", r.scenario_b_pick},
            {"alg2_pick_a", r.alg2_pick_a},
            {"alg2_pick_b", r.alg2_pick_b},
            {"two_stage_flips", r.two_stage_flips},
            {"alg2_stable", r.alg2_stable},
            {"pass", r.contract_holds}};
}

json experiment_rate_check(const RunConfig& cfg) {
    json out;
    diagnostics::RateFit fit;
    double floor = 0.0;
    if (cfg.planted_rate) {
        const double rho = *cfg.planted_rate;
        require(rho > 0.0 && rho < 1.0, ErrorKind::validation, "--planted-rate must lie in (0, 1)");
        std::vector<double> excess;
        for (std::size_t k = 0; k < std::max<std::size_t>(cfg.reps, 3); ++k)
            excess.push_back(0.5 * std::pow(rho, static_cast<double>(k)));
        fit = diagnostics::fit_rate_excess(excess, 0.0);
        out["source"] = "planted";
        out["planted_rate"] = rho;
    } else {
        KernelBank bank;
        Vector y;
        if (!cfg.data.empty()) {
            auto p = load_problem(cfg);
            bank = std::move(p.bank);
            y = std::move(p.y);
            out["source"] = "data";
        } else {
            const auto spec = cfg.synthetic({});
            auto inst = datagen::generate(spec);
            bank = std::move(inst.bank);
            y = std::move(inst.data.labels);
            out["source"] = "synthetic";
            out["instance"] = {{"structure", datagen::to_string(spec.structure)},
                               {"n", spec.n_samples},
                               {"m", spec.n_kernels},
                               {"support", spec.true_support_size},
                               {"noise", spec.noise_std},
                               {"seed", spec.seed}};
        }
        const auto o = oracles::best_subset(bank, y, cfg.d);
        floor = 6.0 * o.epsilon_star + kRateFloorSlack;
        const auto run = l2::solve_l2(bank, y, {cfg.d, cfg.step_scale, cfg.grad_tol});
        fit = diagnostics::fit_rate(run.trace, o.f_star_loss, floor);
        out["oracle"] = oracle_json(bank, o);
        out["iterations"] = run.trace.iterations.size();
        out["loss_after"] = run.trace.loss_after();
    }
    out["floor"] = floor;
    out["fit"] = rate_fit_json(fit);
    out["r_squared_threshold"] = kRateR2Threshold;
    const bool plateau_ok = cfg.planted_rate || fit.plateau_level <= floor;
    out["pass"] = fit.rate < 1.0 && fit.r_squared >= kRateR2Threshold && plateau_ok;
    return out;
}

json experiment_theorem1_check(const RunConfig& cfg) {
    const std::vector<std::size_t> grid = cfg.d_grid.empty() ? std::vector<std::size_t>{3, 5, 8} : cfg.d_grid;
    const double fraction = cfg.lambda_fraction.value_or(kDefaultLambdaFraction);
    json runs = json::array();
    std::size_t satisfied = 0;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
        auto spec = cfg.synthetic(gap_check_defaults());
        spec.seed = cfg.seed + rep;
        const auto inst = datagen::generate(spec);
        const KernelBank& bank = inst.bank;
        const Vector& y = inst.data.labels;
        double lambda = 0.0;
        if (cfg.lambda) {
            lambda = *cfg.lambda;
        } else {
            const auto scores = objective::functional_scores(bank, -y);
            lambda = fraction * *std::max_element(scores.begin(), scores.end());
        }
        const l1::InnerConfig inner{cfg.inner_tol, cfg.inner_max_iter, 0.0};
        const auto full = l1::full_group_lasso(bank, y, lambda, inner);
        const double star = objective::regularized_objective(full.f, bank, y, lambda);
        const double norm = objective::total_norm(full.f, bank);
        for (std::size_t d : grid) {
            l1::L1Config c;
            c.lambda = lambda;
            c.d = d;
            c.inner_tol = cfg.inner_tol;
            c.inner_max_iter = cfg.inner_max_iter;
            const auto run = l1::solve_l1(bank, y, c);
            const double gap = objective::regularized_objective(run.f, bank, y, lambda) - star;
            const double bound = l1::theorem1_gap_bound(norm, d) + 3.0 * cfg.inner_tol;
            const bool ok = gap <= bound;
            satisfied += ok;
            runs.push_back({{"seed", spec.seed},
                            {"d", d},
                            {"lambda", lambda},
                            {"full_objective", star},
                            {"full_norm", norm},
                            {"greedy_objective", star + gap},
                            {"gap", gap},
                            {"bound", bound},
                            {"exit_reason", l1::to_string(run.exit_reason)},
                            {"satisfied", ok}});
        }
    }
    const std::size_t total = runs.size();
    return {{"runs", runs}, {"satisfied", satisfied}, {"total", total}, {"pass", satisfied == total}};
}

json cmd_experiment(const RunConfig& cfg) {
    cfg.validate();
    json rep = report_header(cfg);
    if (cfg.experiment == "counterexample") {
        rep["result"] = experiment_counterexample(cfg.seed);
    } else if (cfg.experiment == "rate_check") {
        rep["result"] = experiment_rate_check(cfg);
    } else if (cfg.experiment == "theorem1_check") {
        rep["result"] = experiment_theorem1_check(cfg);
    } else {
        fail(ErrorKind::validation,
             "--experiment must be one of counterexample, rate_check, theorem1_check (got '" + cfg.experiment + "')");
    }
    rep["pass"] = rep["result"]["pass"];
    return rep;
}

}  // namespace smkl::app
