#include "smkl/solver_l1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smkl::l1 {

void L1Config::validate() const {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::validation, "lambda must be > 0");
    require(d >= 1, ErrorKind::validation, "d must be >= 1");
    require(inner_tol > 0.0, ErrorKind::validation, "inner_tol must be > 0");
    require(inner_max_iter >= 1, ErrorKind::validation, "inner_max_iter must be >= 1");
    require(ridge >= 0.0, ErrorKind::validation, "ridge must be >= 0");
}

std::string_view to_string(ExitReason reason) noexcept {
    return reason == ExitReason::early_optimal ? "early_optimal" : "budget_exhausted";
}

namespace {

struct Block {
    std::vector<std::size_t> members;
    const SpectralCache* cache = nullptr;
    Matrix x;        // U L^{1/2}
    Vector eig;      // L
    Vector curv;     // L/N + 2 ridge_eff
    double ridge_eff = 0.0;
    Vector beta;
};

// argmin_b 0.5 b^T diag(a) b - g^T b + lambda |b|, with a > 0.
Vector solve_block(const Vector& a, const Vector& g, double lambda) {
    const double gn = g.norm();
    if (gn <= lambda) return Vector::Zero(g.size());
    const double amin = a.minCoeff();
    const double amax = a.maxCoeff();
    double t;
    if (amin == amax) {
        t = (gn - lambda) / amin;
    } else {
        // |b| = t solves sum g_i^2 / (a_i t + lambda)^2 = 1. Work with
        // F(t) = S(t)^{-1/2} - 1, increasing and nearly linear in t.
        double lo = (gn - lambda) / amax;
        double hi = (gn - lambda) / amin;
        t = lo;
        for (int it = 0; it < 200; ++it) {
            const Vector den = (a * t).array() + lambda;
            const double s = (g.array().square() / den.array().square()).sum();
            const double f = 1.0 / std::sqrt(s) - 1.0;
            if (f == 0.0) break;
            (f < 0.0 ? lo : hi) = t;
            const double ds = (a.array() * g.array().square() / den.array().cube()).sum();
            const double fp = ds / (s * std::sqrt(s));
            double next = t - f / fp;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - t);
            t = next;
            if (step <= 1e-15 * std::max(t, 1e-300) || hi - lo <= 1e-15 * hi) break;
        }
    }
    return (g.array() * t / ((a * t).array() + lambda)).matrix();
}

std::vector<std::size_t> normalized_support(const KernelBank& bank, const std::vector<std::size_t>& support) {
    require(!support.empty(), ErrorKind::validation, "restricted_mkl: empty support");
    std::vector<std::size_t> s = support;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    require(s.back() < bank.size(), ErrorKind::validation, "restricted_mkl: support index outside the bank");
    return s;
}

Vector fitted(const std::vector<Block>& blocks, Index n) {
    Vector out = Vector::Zero(n);
    for (const auto& b : blocks) {
        if (b.x.cols() > 0) out.noalias() += b.x * b.beta;
    }
    return out;
}

double block_violation(const Block& b, const Vector& res, double lambda, double n) {
    if (b.x.cols() == 0) return 0.0;
    const Vector g = -(b.x.transpose() * res) / n + 2.0 * b.ridge_eff * b.beta;
    const double bn = b.beta.norm();
    if (bn > 0.0) return (g + (lambda / bn) * b.beta).norm();
    return std::max(0.0, g.norm() - lambda);
}

Expansion to_expansion(const std::vector<Block>& blocks, Index n) {
    Expansion f;
    for (const auto& b : blocks) {
        const double share = 1.0 / static_cast<double>(b.members.size());
        Vector alpha = Vector::Zero(n);
        if (b.x.cols() > 0) {
            alpha = b.cache->basis * (share * b.beta.array() / b.eig.array().sqrt()).matrix();
        }
        for (auto j : b.members) f.set(j, alpha);
    }
    return f;
}

}  // namespace

RestrictedSolution restricted_mkl(const KernelBank& bank, const Vector& y, const std::vector<std::size_t>& support,
                                  double lambda, const InnerConfig& inner, const Expansion* warm) {
    require(lambda > 0.0, ErrorKind::validation, "lambda must be > 0");
    require(inner.tol > 0.0 && inner.max_iter >= 1 && inner.ridge >= 0.0, ErrorKind::validation,
            "invalid inner solver configuration");
    require(y.size() == bank.n_samples(), ErrorKind::validation, "label vector length mismatch");
    const auto s = normalized_support(bank, support);
    const Index n = bank.n_samples();
    const double nd = static_cast<double>(n);

    std::vector<Block> blocks;
    for (auto j : s) {
        auto same = std::find_if(blocks.begin(), blocks.end(),
                                 [&](const Block& b) { return bank.identical(b.members.front(), j); });
        if (same != blocks.end()) {
            same->members.push_back(j);
            continue;
        }
        Block b;
        b.members = {j};
        b.cache = &bank.cache(j);
        b.eig = b.cache->eigenvalues;
        b.x = b.cache->basis * b.eig.cwiseSqrt().asDiagonal();
        b.beta = Vector::Zero(b.cache->rank());
        blocks.push_back(std::move(b));
    }
    for (auto& b : blocks) {
        const double c = static_cast<double>(b.members.size());
        b.ridge_eff = inner.ridge / c;
        b.curv = (b.eig / nd).array() + 2.0 * b.ridge_eff;
        if (warm == nullptr || b.x.cols() == 0) continue;
        for (auto j : b.members) {
            if (warm->has(j)) b.beta += b.eig.cwiseSqrt().asDiagonal() * (b.cache->basis.transpose() * warm->block(j));
        }
    }

    double best_violation = std::numeric_limits<double>::infinity();
    std::vector<Vector> best_beta;
    for (std::size_t sweep = 1; sweep <= inner.max_iter; ++sweep) {
        Vector res = y - fitted(blocks, n);
        for (auto& b : blocks) {
            if (b.x.cols() == 0) continue;
            const Vector g = (b.x.transpose() * res) / nd + (b.eig / nd).cwiseProduct(b.beta);
            const Vector next = solve_block(b.curv, g, lambda);
            res.noalias() -= b.x * (next - b.beta);
            b.beta = next;
        }
        // Fresh residual so drift from the incremental updates never
        // enters the stopping test.
        res = y - fitted(blocks, n);
        double violation = 0.0;
        for (const auto& b : blocks) violation = std::max(violation, block_violation(b, res, lambda, nd));
        if (violation < best_violation) {
            best_violation = violation;
            best_beta.clear();
            for (const auto& b : blocks) best_beta.push_back(b.beta);
        }
        if (violation <= inner.tol) return {to_expansion(blocks, n), violation, sweep};
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].beta = best_beta[i];
    throw NotConvergedError("restricted_mkl: no convergence in " + std::to_string(inner.max_iter) +
                                " sweeps (stationarity " + std::to_string(best_violation) + ")",
                            to_expansion(blocks, n), best_violation);
}

RestrictedSolution full_group_lasso(const KernelBank& bank, const Vector& y, double lambda, const InnerConfig& inner) {
    std::vector<std::size_t> all(bank.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return restricted_mkl(bank, y, all, lambda, inner);
}

double stationarity(const Expansion& f, const KernelBank& bank, const Vector& y,
                    const std::vector<std::size_t>& support, double lambda, double ridge) {
    const Vector r = objective::residual(f, bank, y);
    const double n = static_cast<double>(bank.n_samples());
    double worst = 0.0;
    for (auto j : support) {
        // Work in alpha space: grad E_N with respect to f_j is (1/N) sum r_i k_j(x_i,.),
        // and |f_j|_H^2 = alpha^T K alpha.
        const Matrix& k = bank.gram(j);
        const Vector alpha = f.has(j) ? f.block(j) : Vector::Zero(bank.n_samples());
        const double fn = objective::functional_norm(alpha, k);
        // H-norm of v = sum_i w_i k(x_i, .) is sqrt(w^T K w).
        Vector w = r / n + 2.0 * ridge * alpha;
        if (fn > 0.0) w += (lambda / fn) * alpha;
        const double gn = objective::functional_norm(w, k);
        worst = std::max(worst, fn > 0.0 ? gn : std::max(0.0, objective::grad_functional_norm(k, r) - lambda));
    }
    return worst;
}

L1Result solve_l1(const KernelBank& bank, const Vector& y, const L1Config& config) {
    config.validate();
    objective::validate_labels(y);
    require(y.size() == bank.n_samples(), ErrorKind::validation, "label vector length mismatch");
    L1Result out;
    out.initial_objective = objective::regularized_objective(out.f, bank, y, config.lambda);
    std::vector<std::size_t> support;
    for (std::size_t k = 1; k <= config.d; ++k) {
        const Vector r = objective::residual(out.f, bank, y);
        const auto pick = objective::argmax_first(objective::functional_scores(bank, r));
        if (pick.value <= config.lambda + config.inner_tol) {
            out.exit_reason = ExitReason::early_optimal;
            out.trace.converged = true;
            return out;
        }
        IterationRecord rec;
        rec.k = k;
        rec.selected = pick.index;
        rec.selected_id = bank.id(pick.index);
        rec.loss_before = objective::loss_from_residual(r);
        rec.grad_h_selected = pick.value;
        rec.grad_l2_selected = objective::grad_l2_norm(bank.gram(pick.index), r);
        if (std::find(support.begin(), support.end(), pick.index) == support.end()) support.push_back(pick.index);

        out.f = restricted_mkl(bank, y, support, config.lambda, config.inner(), &out.f).f;
        rec.loss_after = objective::empirical_loss(out.f, bank, y);
        rec.support_size = out.f.support().size();
        rec.objective = objective::regularized_objective(out.f, bank, y, config.lambda);
        out.trace.iterations.push_back(std::move(rec));
    }
    out.exit_reason = ExitReason::budget_exhausted;
    return out;
}

Certificate optimality_certificate(const Expansion& f, const KernelBank& bank, const Vector& y, double lambda,
                                   double tol) {
    const Vector r = objective::residual(f, bank, y);
    const auto scores = objective::functional_scores(bank, r);
    const double max_grad = *std::max_element(scores.begin(), scores.end());
    return {max_grad <= lambda + tol, max_grad};
}

double theorem1_gap_bound(double f_star_norm, std::size_t d) {
    require(d >= 2, ErrorKind::domain, "theorem1_gap_bound needs d >= 2");
    return 2.0 * f_star_norm * f_star_norm / static_cast<double>(d - 1);
}

}  // namespace smkl::l1
