#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "smkl/bank.hpp"

namespace smkl {

/// Sparse MKL model f = sum_j f_j with f_j = sum_i alpha_ji k_j(x_i, .).
/// Blocks are keyed by bank index; a stored block may be all zero.
class Expansion {
public:
    using Blocks = std::map<std::size_t, Vector>;

    bool has(std::size_t j) const { return blocks_.count(j) != 0; }
    const Vector& block(std::size_t j) const { return blocks_.at(j); }
    /// The block for kernel j, created as zeros of length n if absent.
    Vector& block(std::size_t j, Index n);
    void set(std::size_t j, Vector alpha) { blocks_[j] = std::move(alpha); }
    void erase(std::size_t j) { blocks_.erase(j); }
    const Blocks& blocks() const { return blocks_; }

    /// Indices with a nonzero coefficient vector, ascending.
    std::vector<std::size_t> support() const;

private:
    Blocks blocks_;
};

namespace objective {

/// Labels must be +1 or -1; the error names the first offending row.
void validate_labels(const Vector& y);

/// sum_j K_j alpha_j, accumulated in ascending kernel index.
Vector predict(const Expansion& f, const KernelBank& bank);

/// predict(f) - y, the square-loss derivative at each sample.
Vector residual(const Expansion& f, const KernelBank& bank, const Vector& y);

/// |r|^2 / (2N).
double loss_from_residual(const Vector& r);

/// (1/2N) |predict(f) - y|^2.
double empirical_loss(const Expansion& f, const KernelBank& bank, const Vector& y);

/// (1/N) sqrt(r^T K r): RKHS norm of the j-th block gradient.
double grad_functional_norm(const Matrix& k, const Vector& r);

/// |K r| / N^{3/2}: empirical l2(D) norm of the j-th block gradient.
double grad_l2_norm(const Matrix& k, const Vector& r);

/// sqrt(alpha^T K alpha).
double functional_norm(const Vector& alpha, const Matrix& k);

/// sum_j |f_j|_H over stored blocks.
double total_norm(const Expansion& f, const KernelBank& bank);

/// E_N(f) + lambda * sum_j |f_j|_H.
double regularized_objective(const Expansion& f, const KernelBank& bank, const Vector& y, double lambda);

/// Per-kernel gradient norms at residual r. The parallel versions evaluate
/// kernels concurrently and are bit-identical to the serial ones.
std::vector<double> functional_scores(const KernelBank& bank, const Vector& r);
std::vector<double> functional_scores_serial(const KernelBank& bank, const Vector& r);
std::vector<double> l2_scores(const KernelBank& bank, const Vector& r);
std::vector<double> l2_scores_serial(const KernelBank& bank, const Vector& r);

struct Pick {
    std::size_t index = 0;
    double value = 0.0;
};

/// Largest value; ties go to the smallest index.
Pick argmax_first(const std::vector<double>& values);

}  // namespace objective
}  // namespace smkl
