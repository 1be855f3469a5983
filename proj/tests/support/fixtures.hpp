#pragma once

// Random instances and independent reference computations for the tests.
// The references deliberately avoid the library's code paths: JacobiSVD and
// QR factorizations instead of dsyevd, power iteration instead of an SVD of
// U_i^T U_j, proximal gradient instead of block coordinate descent.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smkl/bank.hpp"
#include "smkl/kernels.hpp"

namespace fixtures {

using smkl::Index;
using smkl::Matrix;
using smkl::Vector;

inline Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

inline Vector gaussian_vector(std::mt19937_64& rng, Index n) { return gaussian_matrix(rng, n, 1).col(0); }

inline Vector random_labels(std::mt19937_64& rng, Index n) {
    std::bernoulli_distribution coin(0.5);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = coin(rng) ? 1.0 : -1.0;
    return y;
}

/// Normalized Gram of a random N x rank factor: PSD with unit diagonal.
inline smkl::GramMatrix low_rank_gram(std::mt19937_64& rng, Index n, Index rank, const std::string& id) {
    const Matrix f = gaussian_matrix(rng, n, rank);
    return smkl::normalize({id, f * f.transpose()});
}

/// m normalized rbf kernels over random contiguous feature ranges.
inline smkl::KernelBank rbf_bank(std::mt19937_64& rng, Index n, std::size_t m, Index p = 4) {
    const Matrix x = gaussian_matrix(rng, n, p);
    std::uniform_int_distribution<Index> width(1, p);
    std::uniform_real_distribution<double> bw(0.5, 3.0);
    std::vector<smkl::KernelSpec> specs;
    for (std::size_t j = 0; j < m; ++j) {
        smkl::KernelSpec s;
        s.id = "r" + std::to_string(j);
        s.family = smkl::KernelFamily::rbf;
        const Index w = width(rng);
        const Index b = std::uniform_int_distribution<Index>(0, p - w)(rng);
        s.columns = std::pair<Index, Index>{b, b + w};
        s.bandwidth = bw(rng);
        specs.push_back(s);
    }
    return smkl::KernelBank::from_grams(smkl::build_grams(specs, x));
}

/// m normalized linear kernels of the given rank on independent random features.
inline smkl::KernelBank low_rank_bank(std::mt19937_64& rng, Index n, std::size_t m, Index rank) {
    std::vector<smkl::GramMatrix> grams;
    for (std::size_t j = 0; j < m; ++j) grams.push_back(low_rank_gram(rng, n, rank, "l" + std::to_string(j)));
    return smkl::KernelBank::from_grams(std::move(grams));
}

/// Eigenvalues of a PSD matrix as its singular values (descending).
inline Vector psd_eigenvalues(const Matrix& k) {
    Eigen::JacobiSVD<Matrix> svd(k);
    return svd.singularValues();
}

/// Orthonormal basis of range(K) from a JacobiSVD, singular values above rel * max.
inline Matrix svd_range(const Matrix& k, double rel = 1e-8) {
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU);
    const Vector& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > rel * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

/// Largest principal cosine between two ranges by alternating projection
/// (power iteration on P_a P_b) from several random starts.
inline double alternating_projection_cosine(const Matrix& ka, const Matrix& kb, std::uint64_t seed,
                                            int starts = 8, int iters = 20000) {
    const Matrix qa = svd_range(ka);
    const Matrix qb = svd_range(kb);
    const Matrix pa = qa * qa.transpose();
    const Matrix pb = qb * qb.transpose();
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int s = 0; s < starts; ++s) {
        Vector u = (pa * gaussian_vector(rng, ka.rows())).normalized();
        for (int it = 0; it < iters; ++it) {
            const Vector next = pa * (pb * u);
            const double nn = next.norm();
            if (nn < 1e-300) break;
            const double change = (next / nn - u).norm();
            u = next / nn;
            if (change < 1e-15) break;
        }
        const Vector v = pb * u;
        if (v.norm() > 0.0) best = std::max(best, std::abs(u.dot(v.normalized())));
    }
    return best;
}

/// (1/2N)|y - P y|^2 with P from a column-pivoting QR of the stacked ranges.
inline double qr_projection_loss(const std::vector<Matrix>& grams, const Vector& y) {
    if (grams.empty()) return y.squaredNorm() / (2.0 * static_cast<double>(y.size()));
    Matrix stacked(y.size(), 0);
    for (const auto& k : grams) {
        const Matrix q = svd_range(k);
        Matrix next(y.size(), stacked.cols() + q.cols());
        next << stacked, q;
        stacked = next;
    }
    if (stacked.cols() == 0) return y.squaredNorm() / (2.0 * static_cast<double>(y.size()));
    Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
    qr.setThreshold(1e-10);
    const Index r = qr.rank();
    const Matrix q = Matrix(qr.householderQ()).leftCols(r);
    const Vector res = y - q * (q.transpose() * y);
    return res.squaredNorm() / (2.0 * static_cast<double>(y.size()));
}

/// Best support of size <= d by a recursive search over QR projection losses.
/// Ties keep the first support reached in lexicographic order.
struct SubsetAnswer {
    double loss;
    std::vector<std::size_t> support;
};

inline SubsetAnswer recursive_best_subset(const smkl::KernelBank& bank, const Vector& y, std::size_t d) {
    SubsetAnswer best{y.squaredNorm() / (2.0 * static_cast<double>(y.size())), {}};
    std::vector<std::size_t> current;
    std::function<void(std::size_t)> visit = [&](std::size_t start) {
        for (std::size_t j = start; j < bank.size(); ++j) {
            current.push_back(j);
            std::vector<Matrix> grams;
            for (auto i : current) grams.push_back(bank.gram(i));
            const double loss = qr_projection_loss(grams, y);
            if (loss < best.loss - 1e-12) best = {loss, current};
            if (current.size() < d) visit(j + 1);
            current.pop_back();
        }
    };
    visit(0);
    return best;
}

/// Square root factor M with M M^T = K from a JacobiSVD.
inline Matrix svd_sqrt(const Matrix& k) {
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU);
    return svd.matrixU() * svd.singularValues().cwiseSqrt().asDiagonal();
}

/// Group lasso min (1/2N)|sum_j M_j w_j - y|^2 + lambda sum_j |w_j| by FISTA
/// with restarts, where M_j M_j^T = K_j. Returns the objective value.
inline double fista_group_lasso(const std::vector<Matrix>& grams, const Vector& y, double lambda,
                                int iters = 200000) {
    const Index n = y.size();
    const auto m = static_cast<Index>(grams.size());
    Matrix big(n, n * m);
    for (Index j = 0; j < m; ++j) big.middleCols(j * n, n) = svd_sqrt(grams[j]);
    const double nd = static_cast<double>(n);
    const double lip = psd_eigenvalues(big.transpose() * big)(0) / nd;
    auto objective = [&](const Vector& w) {
        double reg = 0.0;
        for (Index j = 0; j < m; ++j) reg += w.segment(j * n, n).norm();
        return (big * w - y).squaredNorm() / (2.0 * nd) + lambda * reg;
    };
    auto prox = [&](Vector v) {
        for (Index j = 0; j < m; ++j) {
            auto seg = v.segment(j * n, n);
            const double s = seg.norm();
            const double t = lambda / lip;
            seg *= s > t ? (1.0 - t / s) : 0.0;
        }
        return v;
    };
    Vector w = Vector::Zero(n * m);
    Vector z = w;
    double t = 1.0;
    double prev = objective(w);
    for (int it = 0; it < iters; ++it) {
        const Vector grad = big.transpose() * (big * z - y) / nd;
        const Vector next = prox(z - grad / lip);
        const double value = objective(next);
        if (value > prev) {
            // Adaptive restart.
            z = w;
            t = 1.0;
            continue;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = next + ((t - 1.0) / tn) * (next - w);
        if (prev - value < 1e-16 && it > 100) {
            w = next;
            prev = value;
            break;
        }
        w = next;
        t = tn;
        prev = value;
    }
    return prev;
}

}  // namespace fixtures
