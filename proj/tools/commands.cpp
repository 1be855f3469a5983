#include <algorithm>
#include <fstream>
#include <numeric>

#include "app.hpp"
#include "report.hpp"
#include "smkl/diagnostics.hpp"
#include "smkl/error.hpp"
#include "smkl/oracles.hpp"
#include "smkl/solver_l1.hpp"
#include "smkl/solver_l2.hpp"

namespace smkl::app {

namespace {

std::vector<Index> iota_indices(Index n) {
    std::vector<Index> out(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), Index{0});
    return out;
}

double holdout_loss(const Problem& p, const Expansion& f) {
    Vector pred = Vector::Zero(p.holdout_y.size());
    for (const auto& [j, alpha] : f.blocks()) pred += p.holdout_cross[j] * alpha;
    return (pred - p.holdout_y).squaredNorm() / (2.0 * static_cast<double>(p.holdout_y.size()));
}

l1::InnerConfig inner_config(const RunConfig& cfg) { return {cfg.inner_tol, cfg.inner_max_iter, 0.0}; }

double require_lambda(const RunConfig& cfg) {
    require(cfg.lambda.has_value(), ErrorKind::validation,
            "--lambda is required for algorithm " + std::string(to_string(cfg.algorithm)));
    return *cfg.lambda;
}

// Runs `fn`; on a library error returns an omission marker instead.
template <typename Fn>
json or_omitted(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return omitted(e);
    }
}

}  // namespace

Problem load_problem(const RunConfig& cfg) {
    require(!cfg.data.empty(), ErrorKind::validation, "--data is required");
    require(!cfg.kernels.empty(), ErrorKind::validation, "--kernels is required");
    const Dataset ds = datagen::load_dataset(cfg.data, datagen::parse_format(cfg.format));
    Problem p;
    p.specs = load_kernel_specs(cfg.kernels);
    auto grams = build_grams(p.specs, ds.features);
    if (cfg.holdout > 0.0) {
        p.split = datagen::holdout_split(ds.size(), cfg.holdout, cfg.seed);
        require(!p.split.train.empty() && !p.split.test.empty(), ErrorKind::validation,
                "holdout fraction leaves an empty train or test set");
        for (auto& g : grams) {
            p.holdout_cross.push_back(g.entries(p.split.test, p.split.train));
            g.entries = Matrix(g.entries(p.split.train, p.split.train));
        }
        p.y = ds.labels(p.split.train);
        p.holdout_y = ds.labels(p.split.test);
    } else {
        p.split.train = iota_indices(ds.size());
        p.y = ds.labels;
    }
    p.bank = KernelBank::from_grams(std::move(grams));
    return p;
}

json cmd_solve(const RunConfig& cfg) {
    cfg.validate();
    const Problem p = load_problem(cfg);
    const KernelBank& bank = p.bank;
    const Vector& y = p.y;
    json rep = report_header(cfg);
    rep["n_samples"] = bank.n_samples();
    rep["n_kernels"] = bank.size();
    std::vector<std::size_t> every(bank.size());
    std::iota(every.begin(), every.end(), std::size_t{0});
    rep["kernel_ids"] = bank.ids(every);
    rep["algorithm"] = to_string(cfg.algorithm);

    Expansion f;
    switch (cfg.algorithm) {
        case Algorithm::l2_greedy: {
            const auto res = l2::solve_l2(bank, y, {cfg.d, cfg.step_scale, cfg.grad_tol});
            f = res.f;
            rep["trace"] = trace_json(res.trace);
            rep["converged"] = res.trace.converged;
            break;
        }
        case Algorithm::l1_greedy: {
            l1::L1Config c;
            c.lambda = require_lambda(cfg);
            c.d = cfg.d;
            c.inner_tol = cfg.inner_tol;
            c.inner_max_iter = cfg.inner_max_iter;
            const auto res = l1::solve_l1(bank, y, c);
            f = res.f;
            rep["trace"] = trace_json(res.trace);
            rep["exit_reason"] = l1::to_string(res.exit_reason);
            rep["initial_objective"] = res.initial_objective;
            rep["objective"] = objective::regularized_objective(f, bank, y, c.lambda);
            const auto cert = l1::optimality_certificate(f, bank, y, c.lambda, c.inner_tol);
            rep["certificate"] = {{"is_optimal", cert.is_optimal}, {"max_grad", cert.max_grad}};
            break;
        }
        case Algorithm::two_stage: {
            const double lambda = require_lambda(cfg);
            const auto ts = oracles::two_stage(bank, y, lambda, cfg.d, inner_config(cfg));
            f = ts.refit.f;
            rep["trace"] = json::array();
            rep["full_norms"] = by_id(bank, ts.full_norms);
            rep["kept"] = ids_of(bank, ts.kept);
            rep["full_objective"] = objective::regularized_objective(ts.full.f, bank, y, lambda);
            rep["objective"] = objective::regularized_objective(f, bank, y, lambda);
            break;
        }
        case Algorithm::oracle: {
            const auto o = oracles::best_subset(bank, y, cfg.d);
            if (!o.best_support.empty()) {
                const auto fit = oracles::global_min_loss(bank.subset(o.best_support), y);
                for (const auto& [k, alpha] : fit.f.blocks()) f.set(o.best_support[k], alpha);
            }
            rep["trace"] = json::array();
            rep["oracle"] = oracle_json(bank, o);
            break;
        }
    }
    rep["support"] = ids_of(bank, f.support());
    std::vector<double> norms(bank.size(), 0.0);
    for (const auto& [j, alpha] : f.blocks()) norms[j] = objective::functional_norm(alpha, bank.gram(j));
    rep["kernel_norms"] = by_id(bank, norms);
    rep["total_norm"] = objective::total_norm(f, bank);
    rep["empirical_loss"] = objective::empirical_loss(f, bank, y);
    if (cfg.holdout > 0.0) {
        rep["holdout"] = {{"fraction", cfg.holdout},
                          {"n_train", p.split.train.size()},
                          {"n_test", p.split.test.size()},
                          {"loss", holdout_loss(p, f)}};
    } else {
        rep["holdout"] = nullptr;
    }
    return rep;
}

json cmd_diagnose(const RunConfig& cfg) {
    cfg.validate();
    const Problem p = load_problem(cfg);
    const KernelBank& bank = p.bank;
    const Vector& y = p.y;
    json rep = report_header(cfg);
    rep["n_samples"] = bank.n_samples();
    rep["n_kernels"] = bank.size();

    const auto dep = diagnostics::dependency_report(bank, cfg.d);
    rep["dependency"] = dependency_json(dep);

    // gamma(2d) drives tau and required_d; only its analytic upper bound is available.
    const auto dep2 = diagnostics::dependency_report(bank, 2 * cfg.d);
    rep["gamma_2d_bound"] = dep2.gamma_bound ? json(*dep2.gamma_bound) : json(nullptr);

    // Probe the kernels Algorithm 2 would consider first.
    const auto scores = objective::l2_scores(bank, -y);
    std::vector<std::size_t> order(bank.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
    order.resize(std::min(cfg.d, order.size()));
    std::sort(order.begin(), order.end());
    rep["gamma_probe"] = or_omitted([&] {
        return json{{"value", diagnostics::gamma_probe(bank, order, cfg.samples, cfg.seed)},
                    {"samples", cfg.samples},
                    {"seed", cfg.seed},
                    {"support", ids_of(bank, order)}};
    });

    json taus = json::array();
    for (double mu : cfg.mu_grid) {
        if (dep2.gamma_bound) {
            taus.push_back({{"mu", mu}, {"tau", or_omitted([&] { return json(diagnostics::tau(mu, *dep2.gamma_bound)); })}});
        } else {
            taus.push_back({{"mu", mu}, {"tau", omitted("gamma_bound_invalid", "no finite bound on gamma(2d)")}});
        }
    }
    rep["tau"] = taus;

    std::optional<double> eps = cfg.epsilon_star;
    if (eps) {
        rep["epsilon_star"] = {{"value", *eps}, {"source", "config"}};
    } else {
        try {
            const auto o = oracles::best_subset(bank, y, cfg.d);
            eps = o.epsilon_star;
            rep["epsilon_star"] = {{"value", *eps}, {"source", "oracle"}, {"oracle", oracle_json(bank, o)}};
        } catch (const Error& e) {
            rep["epsilon_star"] = omitted(e);
        }
    }

    if (!eps) {
        rep["required_d"] = omitted("epsilon_star_unavailable", "epsilon_star was neither supplied nor computed");
    } else if (!dep2.gamma_bound) {
        rep["required_d"] = omitted("gamma_bound_invalid", "no finite bound on gamma(2d)");
    } else {
        rep["required_d"] = or_omitted([&] {
            const auto req = diagnostics::required_d(*dep2.gamma_bound, *eps);
            return json{{"value", req.value}, {"vacuous", req.vacuous}, {"gamma_2d", *dep2.gamma_bound},
                        {"satisfied", !req.vacuous && static_cast<double>(cfg.d) >= req.value}};
        });
    }

    if (!cfg.a || !cfg.r) {
        rep["gen_bound"] = omitted("not_requested", "--A and --R are required for gen_bound");
    } else {
        rep["gen_bound"] = or_omitted([&] {
            return json{{"value", diagnostics::gen_bound(*cfg.r, cfg.d, bank.size(),
                                                         static_cast<std::size_t>(bank.n_samples()), *cfg.a,
                                                         eps.value_or(0.0))},
                        {"R", *cfg.r},
                        {"A", *cfg.a},
                        {"epsilon_star", eps.value_or(0.0)}};
        });
    }
    return rep;
}

json cmd_gen_data(const RunConfig& cfg) {
    cfg.validate();
    require(!cfg.out.empty(), ErrorKind::validation, "gen-data requires --out <prefix>");
    const auto spec = cfg.synthetic({});
    const auto inst = datagen::generate(spec);

    const std::string csv = cfg.out + ".csv";
    const std::string kernels = cfg.out + ".kernels";
    const std::string truth = cfg.out + ".truth.json";
    datagen::write_csv(csv, inst.data);
    {
        std::ofstream k(kernels);
        require(static_cast<bool>(k), ErrorKind::io, "cannot write " + kernels);
        for (const auto& s : inst.kernels) k << format_kernel_spec(s) << '\n';
        require(static_cast<bool>(k), ErrorKind::io, "write failed: " + kernels);
    }
    json t = {{"structure", datagen::to_string(spec.structure)},
              {"seed", cfg.seed},
              {"support", ids_of(inst.bank, inst.truth.support)},
              {"planted_loss", inst.truth.planted_loss},
              {"target", std::vector<double>(inst.truth.target.begin(), inst.truth.target.end())}};
    {
        std::ofstream o(truth);
        require(static_cast<bool>(o), ErrorKind::io, "cannot write " + truth);
        o << t.dump(2) << '\n';
        require(static_cast<bool>(o), ErrorKind::io, "write failed: " + truth);
    }
    json rep = report_header(cfg);
    rep["files"] = {{"data", csv}, {"kernels", kernels}, {"truth", truth}};
    rep["n_samples"] = inst.data.size();
    rep["n_features"] = inst.data.features.cols();
    rep["n_kernels"] = inst.bank.size();
    return rep;
}

}  // namespace smkl::app
