#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smkl/objective.hpp"
#include "smkl/solver_l1.hpp"

namespace smkl::oracles {

struct GlobalMin {
    double loss = 0.0;
    Expansion f;  ///< minimum-norm coefficients realizing the projection
};

/// Unrestricted empirical minimizer: projection of y onto the span of all
/// kernel ranges.
GlobalMin global_min_loss(const KernelBank& bank, const Vector& y);

/// (1/2N)|y - P_S y|^2 for S the span of the ranges of `support`.
double subset_loss(const KernelBank& bank, const Vector& y, const std::vector<std::size_t>& support);

enum class SubsetMethod { enumeration, orthogonal };

struct OracleResult {
    double f_star_loss = 0.0;
    double f_hat_loss = 0.0;
    double epsilon_star = 0.0;
    std::vector<std::size_t> best_support;
    SubsetMethod method = SubsetMethod::enumeration;
    std::size_t subsets_examined = 0;
};

inline constexpr std::size_t kDefaultEnumerationCap = 100000;

/// Losses within this of the incumbent count as ties; the incumbent (the
/// lexicographically smaller support) is kept.
inline constexpr double kSubsetTieTol = 1e-12;

/// Number of supports of size 1..d over m kernels, saturating at cap + 1.
std::size_t count_supports(std::size_t m, std::size_t d, std::size_t cap);

/**
 * Best support of size <= d by exhaustive search in lexicographic order.
 *
 * When the search would exceed `cap` supports and every pair of ranges is
 * orthogonal, the projection loss is additive over kernels and the best
 * support is the d largest projection energies |U_j^T y|^2 (zero energies
 * dropped). Otherwise the call fails with enumeration_infeasible.
 */
OracleResult best_subset(const KernelBank& bank, const Vector& y, std::size_t d,
                         std::size_t cap = kDefaultEnumerationCap);
OracleResult best_subset_serial(const KernelBank& bank, const Vector& y, std::size_t d,
                                std::size_t cap = kDefaultEnumerationCap);

struct TwoStageResult {
    l1::RestrictedSolution full;
    std::vector<double> full_norms;  ///< |f_j|_H of the full solution, by bank index
    std::vector<std::size_t> kept;   ///< ascending
    l1::RestrictedSolution refit;
};

/// Full group lasso, keep the min(d, m) kernels with the largest functional
/// norm (ties by index), refit on those.
TwoStageResult two_stage(const KernelBank& bank, const Vector& y, double lambda, std::size_t d,
                         const l1::InnerConfig& inner = {});

struct CounterexampleScenario {
    std::size_t n_kernels = 0;
    std::vector<double> full_norms;
    std::string two_stage_pick;
    std::string alg2_pick;
};

struct CounterexampleResult {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double norm_ratio = 0.0;  ///< |f_k1| / |f_k2| in scenario A
    CounterexampleScenario a;
    CounterexampleScenario b;
    std::string scenario_a_pick;
    std::string scenario_b_pick;
    std::string alg2_pick_a;
    std::string alg2_pick_b;
    bool two_stage_flips = false;
    bool alg2_stable = false;
    bool contract_holds = false;
};

/// "k1", "k1_copyN" -> "k1"; anything else unchanged.
std::string kernel_family(const std::string& id);

inline constexpr double kHarnessRidge = 1e-6;

/**
 * Two single-frequency kernels k1, k2 with lambda chosen so the full group
 * lasso norms split 0.8 / 0.2 (scenario A), then the same data with k1
 * present ten times (scenario B). Reports the top-1 two-stage pick and the
 * d = 1 greedy l2 pick for both. Fails with a harness error if scenario A's
 * norm ratio falls outside [3, 10).
 */
CounterexampleResult counterexample_harness(std::uint64_t seed, std::size_t n_samples = 64, double noise_std = 0.0);

}  // namespace smkl::oracles
