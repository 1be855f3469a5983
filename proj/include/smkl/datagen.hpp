#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smkl/bank.hpp"
#include "smkl/kernels.hpp"

namespace smkl {

/// N feature rows and labels in {-1, +1}.
struct Dataset {
    Matrix features;
    Vector labels;

    Index size() const { return labels.size(); }
};

namespace datagen {

enum class Structure { orthogonal_ranges, random_rbf_bank, duplicate_counterexample };

std::string_view to_string(Structure s) noexcept;
Structure parse_structure(std::string_view name);

struct SyntheticSpec {
    std::size_t n_samples = 200;
    std::size_t n_kernels = 50;
    std::size_t true_support_size = 5;
    double noise_std = 0.1;
    Structure structure = Structure::orthogonal_ranges;
    std::uint64_t seed = 0;
    std::size_t n_features = 5;  ///< raw feature count for random_rbf_bank

    void validate() const;
};

struct GroundTruth {
    std::vector<std::size_t> support;  ///< planted kernels, ascending
    Vector target;                     ///< noise-free target values
    double planted_loss = 0.0;         ///< projection loss of y onto the planted span
};

struct Instance {
    Dataset data;
    std::vector<KernelSpec> kernels;
    KernelBank bank;
    GroundTruth truth;
};

/**
 * orthogonal_ranges: samples are the grid t = 0..N-1 and each kernel is a
 * linear kernel over its own block of Fourier features [cos, sin](2 pi k t/N).
 * Distinct frequencies are orthogonal on the grid, so the ranges are exactly
 * orthogonal. The target is a half-wave antisymmetric pattern of period P
 * (the smallest multiple of 4 dividing N with P >= 4s); its spectrum lives on
 * the odd harmonics of N/P, which are split among the s planted kernels. The
 * remaining frequencies are dealt to the other kernels in equal shares.
 *
 * random_rbf_bank: Gaussian features, rbf kernels over random contiguous
 * feature ranges and bandwidths, target sum_j K_j c_j over the planted set.
 *
 * duplicate_counterexample: two single-frequency kernels k1, k2; the bank is
 * k1 followed by m-2 exact copies and then k2. Labels mix both frequencies so
 * that b2 < b1 < 4 b2, where b_j = sqrt(y^T K_j y) / N.
 *
 * Labels are sign(target + noise_std * g) with sign(0) = +1.
 */
Instance generate(const SyntheticSpec& spec);

/// Rank-one kernels h_j h_j^T on distinct Sylvester-Hadamard columns (N a power
/// of two, m < N). Ranges are orthogonal and every K_j / N has eigenvalue 1.
Instance sign_basis(std::size_t n_samples, std::size_t n_kernels, std::size_t support_size, double noise_std,
                    std::uint64_t seed);

enum class Format { csv, sparse_labeled };

Format parse_format(std::string_view name);

/// csv: optional header (label column "y" when present, else the last
/// column). sparse_labeled: "label idx:value ..." with 1-based indices.
Dataset load_dataset(const std::string& path, Format format);

/// Header x1..xp,y and every value printed with 17 significant digits.
void write_csv(const std::string& path, const Dataset& data);

struct Split {
    std::vector<Index> train;
    std::vector<Index> test;
};

/// Seeded shuffle; round(fraction * N) samples go to test. Both index lists
/// are ascending.
Split holdout_split(Index n, double fraction, std::uint64_t seed);

}  // namespace datagen
}  // namespace smkl
