#pragma once

#include <vector>

#include "smkl/error.hpp"
#include "smkl/objective.hpp"
#include "smkl/trace.hpp"

namespace smkl::l1 {

struct InnerConfig {
    double tol = 1e-8;  ///< max block subgradient violation at exit
    std::size_t max_iter = 10000;  ///< cyclic sweeps
    double ridge = 0.0;  ///< eps in + eps * sum_j |f_j|_H^2
};

struct L1Config {
    double lambda = 0.0;
    std::size_t d = 1;
    double inner_tol = 1e-8;
    std::size_t inner_max_iter = 10000;
    double ridge = 0.0;

    void validate() const;
    InnerConfig inner() const { return {inner_tol, inner_max_iter, ridge}; }
};

/// Raised when the inner solver exhausts its sweep budget. Carries the
/// iterate with the smallest stationarity residual seen.
class NotConvergedError : public Error {
public:
    NotConvergedError(const std::string& message, Expansion best, double stationarity)
        : Error(ErrorKind::not_converged, message), best_(std::move(best)), stationarity_(stationarity) {}

    const Expansion& best() const noexcept { return best_; }
    double stationarity() const noexcept { return stationarity_; }

private:
    Expansion best_;
    double stationarity_;
};

struct RestrictedSolution {
    Expansion f;
    double stationarity = 0.0;
    std::size_t sweeps = 0;
};

/**
 * Group-lasso problem restricted to `support`:
 *   min (1/2N)|sum_j K_j a_j - y|^2 + lambda sum_j |f_j|_H + ridge sum_j |f_j|_H^2.
 *
 * Each block is reparametrized as a_j = U_j L_j^{-1/2} b_j, which turns
 * |f_j|_H into |b_j| and K_j a_j into X_j b_j with X_j^T X_j = L_j diagonal.
 * Cyclic block coordinate descent then minimizes each block exactly.
 * Bitwise-identical kernels in the support are merged into one block and
 * split equally on return, which is the minimum of the ridge term.
 *
 * @param warm  optional starting point; blocks outside support are ignored.
 */
RestrictedSolution restricted_mkl(const KernelBank& bank, const Vector& y, const std::vector<std::size_t>& support,
                                  double lambda, const InnerConfig& inner, const Expansion* warm = nullptr);

/// restricted_mkl over every kernel in the bank.
RestrictedSolution full_group_lasso(const KernelBank& bank, const Vector& y, double lambda,
                                    const InnerConfig& inner);

/// Largest block subgradient violation of f on its blocks in `support`.
double stationarity(const Expansion& f, const KernelBank& bank, const Vector& y,
                    const std::vector<std::size_t>& support, double lambda, double ridge = 0.0);

enum class ExitReason { early_optimal, budget_exhausted };

std::string_view to_string(ExitReason reason) noexcept;

struct L1Result {
    Expansion f;
    SolverTrace trace;
    ExitReason exit_reason = ExitReason::budget_exhausted;
    double initial_objective = 0.0;
};

/// Greedy selection by functional gradient norm with a restricted re-solve
/// after each addition. Exits early once no kernel's gradient exceeds
/// lambda + inner_tol.
L1Result solve_l1(const KernelBank& bank, const Vector& y, const L1Config& config);

struct Certificate {
    bool is_optimal = false;
    double max_grad = 0.0;
};

/// is_optimal iff max_j |grad_j E_N(f)|_H <= lambda + tol over the whole bank.
Certificate optimality_certificate(const Expansion& f, const KernelBank& bank, const Vector& y, double lambda,
                                   double tol = 1e-8);

/// 2 |f*|^2 / (d - 1); d >= 2.
double theorem1_gap_bound(double f_star_norm, std::size_t d);

}  // namespace smkl::l1
