#include "smkl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "smkl/datagen.hpp"
#include "smkl/error.hpp"
#include "smkl/parallel.hpp"
#include "smkl/solver_l2.hpp"

namespace smkl::oracles {

namespace {

double half_mean_square(const Vector& r) { return r.squaredNorm() / (2.0 * static_cast<double>(r.size())); }

std::vector<std::size_t> all_indices(std::size_t m) {
    std::vector<std::size_t> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = j;
    return out;
}

}  // namespace

double subset_loss(const KernelBank& bank, const Vector& y, const std::vector<std::size_t>& support) {
    require(y.size() == bank.n_samples(), ErrorKind::validation, "label vector length mismatch");
    std::vector<const SpectralCache*> caches;
    for (auto j : support) caches.push_back(&bank.cache(j));
    return half_mean_square(numlin::span_residual(caches, y));
}

GlobalMin global_min_loss(const KernelBank& bank, const Vector& y) {
    require(!bank.empty(), ErrorKind::validation, "kernel bank is empty");
    GlobalMin out;
    out.loss = subset_loss(bank, y, all_indices(bank.size()));

    // Minimum-norm w solving [U_1, ..., U_m] w ~ y gives the projection as
    // sum_j U_j w_j; alpha_j = U_j L_j^{-1} w_j then has K_j alpha_j = U_j w_j.
    Index cols = 0;
    for (std::size_t j = 0; j < bank.size(); ++j) cols += bank.cache(j).rank();
    const Index n = bank.n_samples();
    if (cols == 0) return out;
    Matrix b(n, cols);
    Index at = 0;
    for (std::size_t j = 0; j < bank.size(); ++j) {
        const auto& c = bank.cache(j);
        b.middleCols(at, c.rank()) = c.basis;
        at += c.rank();
    }
    Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-8);
    const Vector w = svd.solve(y);
    at = 0;
    for (std::size_t j = 0; j < bank.size(); ++j) {
        const auto& c = bank.cache(j);
        if (c.rank() > 0)
            out.f.set(j, c.basis * (w.segment(at, c.rank()).array() / c.eigenvalues.head(c.rank()).array()).matrix());
        at += c.rank();
    }
    return out;
}

std::size_t count_supports(std::size_t m, std::size_t d, std::size_t cap) {
    const std::size_t top = std::min(d, m);
    std::size_t total = 0;
    long double binom = 1.0L;
    for (std::size_t k = 1; k <= top; ++k) {
        binom = binom * static_cast<long double>(m - k + 1) / static_cast<long double>(k);
        total += static_cast<std::size_t>(std::min<long double>(std::round(binom), cap + 1.0L));
        if (total > cap) return cap + 1;
    }
    return total;
}

namespace {

// Supports of size 1..d in lexicographic order (each prefix precedes its
// extensions).
void enumerate(std::size_t m, std::size_t d, std::size_t start, std::vector<std::size_t>& current,
               std::vector<std::vector<std::size_t>>& out) {
    for (std::size_t j = start; j < m; ++j) {
        current.push_back(j);
        out.push_back(current);
        if (current.size() < d) enumerate(m, d, j + 1, current, out);
        current.pop_back();
    }
}

OracleResult orthogonal_best(const KernelBank& bank, const Vector& y, std::size_t d) {
    const double n = static_cast<double>(bank.n_samples());
    std::vector<double> energy(bank.size());
    for (std::size_t j = 0; j < bank.size(); ++j) {
        const auto& c = bank.cache(j);
        energy[j] = c.rank() ? (c.basis.transpose() * y).squaredNorm() : 0.0;
    }
    std::vector<std::size_t> order = all_indices(bank.size());
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return energy[a] > energy[b]; });
    OracleResult out;
    out.method = SubsetMethod::orthogonal;
    for (std::size_t i = 0; i < std::min(d, order.size()); ++i) {
        // A kernel whose energy cannot move the loss past the tie tolerance
        // would lose the lexicographic tie-break to the smaller support.
        if (energy[order[i]] / (2.0 * n) > kSubsetTieTol) out.best_support.push_back(order[i]);
    }
    std::sort(out.best_support.begin(), out.best_support.end());
    out.subsets_examined = 1;
    return out;
}

bool all_orthogonal(const KernelBank& bank) {
    std::vector<const SpectralCache*> ranked;
    for (std::size_t j = 0; j < bank.size(); ++j) {
        if (bank.cache(j).rank() > 0) ranked.push_back(&bank.cache(j));
    }
    return numlin::max_pairwise_correlation(ranked) == 0.0;
}

OracleResult best_subset_impl(const KernelBank& bank, const Vector& y, std::size_t d, std::size_t cap,
                              bool parallel) {
    require(!bank.empty(), ErrorKind::validation, "kernel bank is empty");
    require(d >= 1, ErrorKind::validation, "d must be >= 1");
    require(y.size() == bank.n_samples(), ErrorKind::validation, "label vector length mismatch");
    const std::size_t m = bank.size();
    const std::size_t count = count_supports(m, d, cap);

    OracleResult out;
    if (count > cap) {
        require(all_orthogonal(bank), ErrorKind::enumeration_infeasible,
                "best_subset: more than " + std::to_string(cap) + " supports for m = " + std::to_string(m) +
                    ", d = " + std::to_string(d) + "; shrink m or d");
        out = orthogonal_best(bank, y, d);
        out.f_hat_loss = subset_loss(bank, y, out.best_support);
    } else {
        std::vector<std::vector<std::size_t>> supports;
        supports.reserve(count);
        std::vector<std::size_t> current;
        enumerate(m, std::min(d, m), 0, current, supports);
        std::vector<double> losses(supports.size());
        const auto total = static_cast<std::ptrdiff_t>(supports.size());
        if (parallel) {
            parallel_for(total, [&](std::ptrdiff_t i) { losses[i] = subset_loss(bank, y, supports[i]); });
        } else {
            for (std::ptrdiff_t i = 0; i < total; ++i) losses[i] = subset_loss(bank, y, supports[i]);
        }
        // Serial reduction in enumeration order, starting from the empty support.
        out.f_hat_loss = half_mean_square(y);
        for (std::size_t i = 0; i < supports.size(); ++i) {
            if (losses[i] < out.f_hat_loss - kSubsetTieTol) {
                out.f_hat_loss = losses[i];
                out.best_support = supports[i];
            }
        }
        out.subsets_examined = supports.size();
    }
    out.f_star_loss = subset_loss(bank, y, all_indices(m));
    out.epsilon_star = std::max(0.0, out.f_hat_loss - out.f_star_loss);
    return out;
}

}  // namespace

OracleResult best_subset(const KernelBank& bank, const Vector& y, std::size_t d, std::size_t cap) {
    return best_subset_impl(bank, y, d, cap, true);
}

OracleResult best_subset_serial(const KernelBank& bank, const Vector& y, std::size_t d, std::size_t cap) {
    return best_subset_impl(bank, y, d, cap, false);
}

TwoStageResult two_stage(const KernelBank& bank, const Vector& y, double lambda, std::size_t d,
                         const l1::InnerConfig& inner) {
    require(d >= 1, ErrorKind::validation, "d must be >= 1");
    TwoStageResult out;
    out.full = l1::full_group_lasso(bank, y, lambda, inner);
    out.full_norms.resize(bank.size());
    for (std::size_t j = 0; j < bank.size(); ++j) {
        out.full_norms[j] = out.full.f.has(j) ? objective::functional_norm(out.full.f.block(j), bank.gram(j)) : 0.0;
    }
    std::vector<std::size_t> order = all_indices(bank.size());
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return out.full_norms[a] > out.full_norms[b]; });
    out.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(d, order.size())));
    std::sort(out.kept.begin(), out.kept.end());
    out.refit = l1::restricted_mkl(bank, y, out.kept, lambda, inner);
    return out;
}

std::string kernel_family(const std::string& id) {
    const auto pos = id.find("_copy");
    return pos == std::string::npos ? id : id.substr(0, pos);
}

namespace {

CounterexampleScenario run_scenario(const KernelBank& bank, const Vector& y, double lambda,
                                    const l1::InnerConfig& inner) {
    CounterexampleScenario s;
    s.n_kernels = bank.size();
    const auto ts = two_stage(bank, y, lambda, 1, inner);
    s.full_norms = ts.full_norms;
    s.two_stage_pick = bank.id(ts.kept.front());
    const auto greedy = l2::solve_l2(bank, y, {1, 1.0, 1e-12});
    s.alg2_pick = greedy.trace.iterations.empty() ? "" : greedy.trace.iterations.front().selected_id;
    return s;
}

}  // namespace

CounterexampleResult counterexample_harness(std::uint64_t seed, std::size_t n_samples, double noise_std) {
    datagen::SyntheticSpec spec;
    spec.n_samples = n_samples;
    spec.true_support_size = 1;
    spec.noise_std = noise_std;
    spec.structure = datagen::Structure::duplicate_counterexample;
    spec.seed = seed;
    spec.n_kernels = 2;
    const auto base = datagen::generate(spec);
    spec.n_kernels = 11;
    const auto dup = datagen::generate(spec);
    require(base.data.labels == dup.data.labels, ErrorKind::harness, "scenario data differ");

    const Vector& y = base.data.labels;
    const double n = static_cast<double>(y.size());
    CounterexampleResult out;
    out.seed = seed;
    out.b1 = std::sqrt(y.dot(base.bank.gram(0) * y)) / n;
    out.b2 = std::sqrt(y.dot(base.bank.gram(1) * y)) / n;
    require(out.b2 < out.b1 && out.b1 < 4.0 * out.b2, ErrorKind::harness,
            "counterexample: need b2 < b1 < 4 b2, got b1 = " + std::to_string(out.b1) +
                ", b2 = " + std::to_string(out.b2));
    // Both kernels have the single eigenvalue N/2 on orthogonal ranges, so the
    // blocks decouple with |f_j| proportional to b_j - lambda; this lambda
    // makes the split 0.8 / 0.2.
    out.lambda = (4.0 * out.b2 - out.b1) / 3.0;

    const l1::InnerConfig inner{1e-10, 10000, kHarnessRidge};
    out.a = run_scenario(base.bank, y, out.lambda, inner);
    out.norm_ratio = out.a.full_norms[0] / out.a.full_norms[1];
    require(out.norm_ratio >= 3.0 && out.norm_ratio < 10.0, ErrorKind::harness,
            "counterexample: scenario A norm ratio " + std::to_string(out.norm_ratio) + " outside [3, 10) (b1 = " +
                std::to_string(out.b1) + ", b2 = " + std::to_string(out.b2) + ", lambda = " +
                std::to_string(out.lambda) + ")");
    out.b = run_scenario(dup.bank, y, out.lambda, inner);

    out.scenario_a_pick = out.a.two_stage_pick;
    out.scenario_b_pick = out.b.two_stage_pick;
    out.alg2_pick_a = out.a.alg2_pick;
    out.alg2_pick_b = out.b.alg2_pick;
    out.two_stage_flips = kernel_family(out.scenario_a_pick) != kernel_family(out.scenario_b_pick);
    out.alg2_stable = kernel_family(out.alg2_pick_a) == kernel_family(out.alg2_pick_b);
    out.contract_holds = out.two_stage_flips && out.alg2_stable;
    return out;
}

}  // namespace smkl::oracles
