#include "smkl/objective.hpp"

#include <cmath>

#include "smkl/error.hpp"
#include "smkl/parallel.hpp"

namespace smkl {

Vector& Expansion::block(std::size_t j, Index n) {
    auto it = blocks_.find(j);
    if (it == blocks_.end()) it = blocks_.emplace(j, Vector::Zero(n)).first;
    return it->second;
}

std::vector<std::size_t> Expansion::support() const {
    std::vector<std::size_t> out;
    for (const auto& [j, alpha] : blocks_) {
        if (alpha.size() > 0 && alpha.cwiseAbs().maxCoeff() > 0.0) out.push_back(j);
    }
    return out;
}

namespace objective {

void validate_labels(const Vector& y) {
    for (Index i = 0; i < y.size(); ++i) {
        require(y(i) == 1.0 || y(i) == -1.0, ErrorKind::validation,
                "label at row " + std::to_string(i) + " is " + std::to_string(y(i)) +
                    ", expected -1 or +1");
    }
}

Vector predict(const Expansion& f, const KernelBank& bank) {
    const Index n = bank.n_samples();
    Vector out = Vector::Zero(n);
    for (const auto& [j, alpha] : f.blocks()) {
        require(j < bank.size(), ErrorKind::validation,
                "expansion references kernel index " + std::to_string(j) + " outside the bank");
        require(alpha.size() == n, ErrorKind::validation,
                "coefficients for '" + bank.id(j) + "' have wrong length");
        out.noalias() += bank.gram(j) * alpha;
    }
    return out;
}

Vector residual(const Expansion& f, const KernelBank& bank, const Vector& y) {
    require(y.size() == bank.n_samples(), ErrorKind::validation, "label vector length mismatch");
    return predict(f, bank) - y;
}

double loss_from_residual(const Vector& r) {
    return r.squaredNorm() / (2.0 * static_cast<double>(r.size()));
}

double empirical_loss(const Expansion& f, const KernelBank& bank, const Vector& y) {
    return loss_from_residual(residual(f, bank, y));
}

namespace {

// Quadratic form of a PSD matrix. Rounding can push it slightly negative;
// anything below -(1e-8 tr(K) |v|^2 + 1e-10) means K itself is not PSD.
double psd_quadratic(const Matrix& k, const Vector& v) {
    const double q = v.dot(k * v);
    if (q >= 0.0) return q;
    const double tol = 1e-8 * std::abs(k.trace()) * v.squaredNorm() + 1e-10;
    require(q >= -tol, ErrorKind::psd_violation,
            "negative quadratic form " + std::to_string(q) + " (kernel not PSD)");
    return 0.0;
}

}  // namespace

double grad_functional_norm(const Matrix& k, const Vector& r) {
    require(r.size() == k.rows(), ErrorKind::validation, "residual length mismatch");
    return std::sqrt(psd_quadratic(k, r)) / static_cast<double>(r.size());
}

double grad_l2_norm(const Matrix& k, const Vector& r) {
    require(r.size() == k.rows(), ErrorKind::validation, "residual length mismatch");
    const double n = static_cast<double>(r.size());
    return (k * r).norm() / (n * std::sqrt(n));
}

double functional_norm(const Vector& alpha, const Matrix& k) {
    require(alpha.size() == k.rows(), ErrorKind::validation, "coefficient length mismatch");
    return std::sqrt(psd_quadratic(k, alpha));
}

double total_norm(const Expansion& f, const KernelBank& bank) {
    double s = 0.0;
    for (const auto& [j, alpha] : f.blocks()) s += functional_norm(alpha, bank.gram(j));
    return s;
}

double regularized_objective(const Expansion& f, const KernelBank& bank, const Vector& y, double lambda) {
    return empirical_loss(f, bank, y) + lambda * total_norm(f, bank);
}

namespace {

template <class Score>
std::vector<double> score_parallel(const KernelBank& bank, const Vector& r, Score score) {
    require(r.size() == bank.n_samples(), ErrorKind::validation, "residual length mismatch");
    std::vector<double> out(bank.size());
    parallel_for(static_cast<std::ptrdiff_t>(bank.size()),
                 [&](std::ptrdiff_t j) { out[j] = score(bank.gram(j), r); });
    return out;
}

template <class Score>
std::vector<double> score_serial(const KernelBank& bank, const Vector& r, Score score) {
    require(r.size() == bank.n_samples(), ErrorKind::validation, "residual length mismatch");
    std::vector<double> out(bank.size());
    for (std::size_t j = 0; j < bank.size(); ++j) out[j] = score(bank.gram(j), r);
    return out;
}

}  // namespace

std::vector<double> functional_scores(const KernelBank& bank, const Vector& r) {
    return score_parallel(bank, r, grad_functional_norm);
}

std::vector<double> functional_scores_serial(const KernelBank& bank, const Vector& r) {
    return score_serial(bank, r, grad_functional_norm);
}

std::vector<double> l2_scores(const KernelBank& bank, const Vector& r) {
    return score_parallel(bank, r, grad_l2_norm);
}

std::vector<double> l2_scores_serial(const KernelBank& bank, const Vector& r) {
    return score_serial(bank, r, grad_l2_norm);
}

Pick argmax_first(const std::vector<double>& values) {
    require(!values.empty(), ErrorKind::validation, "argmax over an empty set");
    Pick best{0, values.front()};
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (values[j] > best.value) best = {j, values[j]};
    }
    return best;
}

}  // namespace objective
}  // namespace smkl
