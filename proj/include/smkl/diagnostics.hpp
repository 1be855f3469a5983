#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smkl/bank.hpp"
#include "smkl/trace.hpp"

namespace smkl::diagnostics {

struct DependencyReport {
    double delta = 0.0;           ///< max pairwise subspace correlation
    double sigma_plus_min = 0.0;  ///< min_j smallest positive eigenvalue of K_j / N
    std::size_t d = 1;
    bool gamma_bound_valid = false;
    std::optional<double> gamma_bound;  ///< absent when not valid
};

/// sqrt(d) / (sqrt(1 - (d-1) delta) sigma), valid iff (d-1) delta < 1.
std::optional<double> gamma_bound(std::size_t d, double delta, double sigma_plus_min);

DependencyReport dependency_report(const KernelBank& bank, std::size_t d);
DependencyReport dependency_report_serial(const KernelBank& bank, std::size_t d);

/**
 * Sampled lower bound on the restricted constant over J: for each sample,
 * a_j = U_j c_j with c_j standard normal, and the ratio
 * sum_j |a_j| / |sum_j (K_j / N) a_j|. Sample s draws from a generator
 * seeded with (seed, s), so the result does not depend on the thread count.
 */
double gamma_probe(const KernelBank& bank, const std::vector<std::size_t>& support, std::size_t samples,
                   std::uint64_t seed);
double gamma_probe_serial(const KernelBank& bank, const std::vector<std::size_t>& support, std::size_t samples,
                          std::uint64_t seed);

/// (mu - 1)^2 / (8 mu (mu + 1) gamma).
double tau(double mu, double gamma);

struct RequiredD {
    double value = 0.0;
    bool vacuous = false;  ///< epsilon_star >= 1/12: the log term is not positive
};

/// 16 gamma_2d ln(1 / (12 epsilon_star)).
RequiredD required_d(double gamma_2d, double epsilon_star);

/// 6 eps + 196 (R + sqrt(d))^2 sqrt(A ln(m+1) / N), under A > 1, m >= 3 and
/// A ln(m+1) <= N <= 2^(m+1).
double gen_bound(double r, std::size_t d, std::size_t m, std::size_t n, double a, double epsilon_star);

/// The same expression with no precondition checks.
double gen_bound_unchecked(double r, std::size_t d, std::size_t m, std::size_t n, double a, double epsilon_star);

struct RateFit {
    double rate = 1.0;
    double r_squared = 0.0;
    std::size_t plateau_index = 0;  ///< first k with excess_k <= floor, or the sequence length
    double plateau_level = 0.0;     ///< excess at plateau_index, or the last excess
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of ln(excess_k) against k over k < plateau_index.
RateFit fit_rate_excess(const std::vector<double>& excess, double floor);

/// excess_k = loss_after[k] - f_star_loss.
RateFit fit_rate(const SolverTrace& trace, double f_star_loss, double floor);

}  // namespace smkl::diagnostics
