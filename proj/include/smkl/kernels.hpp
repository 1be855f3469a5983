#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smkl/linalg.hpp"

namespace smkl {

enum class KernelFamily { linear, polynomial, rbf, precomputed };

std::string_view to_string(KernelFamily family) noexcept;

/**
 * One base kernel of the bank.
 *
 * linear      k(x, x') = <x, x'>
 * polynomial  k(x, x') = (<x, x'> + offset)^degree
 * rbf         k(x, x') = exp(-|x - x'|^2 / (2 bandwidth^2))
 * precomputed the N x N matrix stored at `path`
 *
 * `columns` restricts the feature-based families to the half-open feature
 * range [first, second).
 */
struct KernelSpec {
    std::string id;
    KernelFamily family = KernelFamily::linear;
    int degree = 2;
    double offset = 0.0;
    double bandwidth = 1.0;
    std::string path;
    std::optional<std::pair<Index, Index>> columns;
};

struct GramMatrix {
    std::string id;
    Matrix entries;

    Index size() const { return entries.rows(); }
};

void validate(const KernelSpec& spec);

/// Gram matrix of `spec` over the rows of `features`. Rows are evaluated in
/// parallel; every entry is an independent scalar evaluation, so the result
/// is bit-identical to gram_serial.
GramMatrix gram(const KernelSpec& spec, const Matrix& features);
GramMatrix gram_serial(const KernelSpec& spec, const Matrix& features);

/// Cosine normalization K(a,b) / sqrt(K(a,a) K(b,b)). Rows with a zero
/// diagonal must be identically zero and stay zero.
GramMatrix normalize(const GramMatrix& gram);

/// Square, finite, symmetric to 1e-12 absolute.
void validate_gram(const GramMatrix& gram);

/// Dense matrix reader: one row per line, entries separated by whitespace
/// and/or commas, '#' starts a comment.
Matrix read_dense_matrix(const std::string& path);
void write_dense_matrix(const std::string& path, const Matrix& m);

/// Kernel spec text: one kernel per line (or ';'-separated inline),
///   <id> <family> [degree=.. offset=.. bandwidth=.. path=.. cols=a:b]
std::vector<KernelSpec> parse_kernel_specs(std::string_view text);
std::vector<KernelSpec> load_kernel_specs(const std::string& path_or_inline);
std::string format_kernel_spec(const KernelSpec& spec);

/// gram + normalize for every spec, in order.
std::vector<GramMatrix> build_grams(const std::vector<KernelSpec>& specs, const Matrix& features);

}  // namespace smkl
