#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smkl/kernels.hpp"
#include "smkl/linalg.hpp"

namespace smkl {

/// Eigen-decomposition of a PSD Gram matrix restricted to its numerical range.
struct SpectralCache {
    std::string kernel_id;
    Vector eigenvalues;  ///< retained eigenvalues, nonincreasing
    Matrix basis;        ///< N x rank, orthonormal columns
    double min_eigenvalue = 0.0;  ///< smallest eigenvalue of the full spectrum
    double max_eigenvalue = 0.0;
    double rank_tol = 0.0;

    Index rank() const { return basis.cols(); }
    Index size() const { return basis.rows(); }
};

namespace numlin {

/// Values at or below this are reported as exactly zero correlation.
inline constexpr double kCorrelationSnap = 1e-10;

inline constexpr double kDefaultRelativeRankTol = 1e-8;

/// rank_tol defaults to kDefaultRelativeRankTol * largest eigenvalue.
SpectralCache spectral_cache(const GramMatrix& k, std::optional<double> rank_tol = std::nullopt);

Vector project_onto_range(const SpectralCache& cache, const Vector& v);

/// Smallest retained eigenvalue of K * scale (scale is 1/N in the analysis).
double min_positive_eigenvalue(const SpectralCache& cache, double scale);

/// Largest principal-angle cosine between range(K_i) and range(K_j).
///
/// The coherence max |(K_i a)^T (K_j b)| / (|K_i a| |K_j b|) ranges over unit
/// vectors u = K_i a / |K_i a| in range(K_i) and v in range(K_j), so it equals
/// max |u^T v| = sigma_max(U_i^T U_j) for orthonormal bases U_i, U_j. Scaling a
/// Gram matrix by a positive constant leaves its range, and so the value, fixed.
double subspace_correlation(const SpectralCache& a, const SpectralCache& b);

/// y minus its orthogonal projection onto span(range(K_j) for the given
/// caches). The union basis is orthonormalized by SVD, dropping singular
/// values at or below 1e-8 * the largest.
Vector span_residual(const std::vector<const SpectralCache*>& caches, const Vector& y);

/// max over all pairs i < j of subspace_correlation; 0 for fewer than two.
double max_pairwise_correlation(const std::vector<const SpectralCache*>& caches);
double max_pairwise_correlation_serial(const std::vector<const SpectralCache*>& caches);

}  // namespace numlin
}  // namespace smkl
