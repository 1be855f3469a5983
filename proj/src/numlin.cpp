#include "smkl/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "smkl/error.hpp"

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w, double* work,
             const int* lwork, int* iwork, const int* liwork, int* info);
// Present when the LAPACK provider is OpenBLAS.
void openblas_set_num_threads(int) __attribute__((weak));
}

namespace smkl::numlin {

namespace {

// In-place eigendecomposition of a symmetric matrix via LAPACK dsyevd:
// `a` receives the eigenvectors, `w` the ascending eigenvalues. BLAS runs
// single-threaded; callers parallelize across kernels instead.
void symmetric_eigen(Matrix& a, Vector& w, const std::string& id) {
    static const bool single_threaded = [] {
        if (openblas_set_num_threads) openblas_set_num_threads(1);
        return true;
    }();
    (void)single_threaded;
    const int n = static_cast<int>(a.rows());
    int info = 0;
    int lwork = -1;
    int liwork = -1;
    double work_query = 0.0;
    int iwork_query = 0;
    dsyevd_("V", "L", &n, a.data(), &n, w.data(), &work_query, &lwork, &iwork_query, &liwork, &info);
    require(info == 0, ErrorKind::validation, "kernel '" + id + "': eigensolver workspace query failed");
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    dsyevd_("V", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork, &info);
    require(info == 0, ErrorKind::validation,
            "kernel '" + id + "': eigendecomposition failed (info " + std::to_string(info) + ")");
}

}  // namespace

SpectralCache spectral_cache(const GramMatrix& k, std::optional<double> rank_tol) {
    validate_gram(k);
    SpectralCache c;
    c.kernel_id = k.id;
    const Index n = k.size();
    if (n == 0) {
        c.basis.resize(0, 0);
        return c;
    }
    Matrix vectors = k.entries;
    Vector w(n);
    symmetric_eigen(vectors, w, k.id);
    c.min_eigenvalue = w(0);
    c.max_eigenvalue = w(n - 1);
    c.rank_tol = rank_tol.value_or(kDefaultRelativeRankTol * std::max(c.max_eigenvalue, 0.0));
    Index r = 0;
    while (r < n && w(n - 1 - r) > c.rank_tol) ++r;
    c.eigenvalues.resize(r);
    c.basis.resize(n, r);
    for (Index i = 0; i < r; ++i) {
        c.eigenvalues(i) = w(n - 1 - i);
        c.basis.col(i) = vectors.col(n - 1 - i);
    }
    return c;
}

Vector project_onto_range(const SpectralCache& cache, const Vector& v) {
    require(v.size() == cache.size(), ErrorKind::validation,
            "project_onto_range: vector length " + std::to_string(v.size()) + " != " +
                std::to_string(cache.size()));
    if (cache.rank() == 0) return Vector::Zero(v.size());
    return cache.basis * (cache.basis.transpose() * v);
}

double min_positive_eigenvalue(const SpectralCache& cache, double scale) {
    require(cache.rank() >= 1, ErrorKind::degenerate_kernel,
            "kernel '" + cache.kernel_id + "' has rank 0");
    return cache.eigenvalues(cache.rank() - 1) * scale;
}

double subspace_correlation(const SpectralCache& a, const SpectralCache& b) {
    require(a.rank() >= 1, ErrorKind::degenerate_kernel, "kernel '" + a.kernel_id + "' has rank 0");
    require(b.rank() >= 1, ErrorKind::degenerate_kernel, "kernel '" + b.kernel_id + "' has rank 0");
    require(a.size() == b.size(), ErrorKind::validation, "subspace_correlation: size mismatch");
    const Matrix cross = a.basis.transpose() * b.basis;
    Eigen::JacobiSVD<Matrix> svd(cross);
    double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return s <= kCorrelationSnap ? 0.0 : s;
}

Vector span_residual(const std::vector<const SpectralCache*>& caches, const Vector& y) {
    Index cols = 0;
    for (const auto* c : caches) {
        require(c->size() == y.size(), ErrorKind::validation, "span_residual: size mismatch");
        cols += c->rank();
    }
    if (cols == 0) return y;
    Matrix stacked(y.size(), cols);
    Index at = 0;
    for (const auto* c : caches) {
        stacked.middleCols(at, c->rank()) = c->basis;
        at += c->rank();
    }
    Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    const Vector& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > 1e-8 * s(0)) ++r;
    const auto q = svd.matrixU().leftCols(r);
    return y - q * (q.transpose() * y);
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t m) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    return pairs;
}

}  // namespace

double max_pairwise_correlation(const std::vector<const SpectralCache*>& caches) {
    if (caches.size() < 2) return 0.0;
    // Validate up front: exceptions must not escape the parallel region.
    for (const auto* c : caches) {
        require(c->rank() >= 1, ErrorKind::degenerate_kernel, "kernel '" + c->kernel_id + "' has rank 0");
        require(c->size() == caches.front()->size(), ErrorKind::validation,
                "subspace_correlation: size mismatch");
    }
    const auto pairs = all_pairs(caches.size());
    std::vector<double> values(pairs.size());
    const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t p = 0; p < count; ++p) {
        values[p] = subspace_correlation(*caches[pairs[p].first], *caches[pairs[p].second]);
    }
    return *std::max_element(values.begin(), values.end());
}

double max_pairwise_correlation_serial(const std::vector<const SpectralCache*>& caches) {
    double best = 0.0;
    for (std::size_t i = 0; i < caches.size(); ++i)
        for (std::size_t j = i + 1; j < caches.size(); ++j)
            best = std::max(best, subspace_correlation(*caches[i], *caches[j]));
    return best;
}

}  // namespace smkl::numlin
