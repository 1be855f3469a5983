#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smkl/kernels.hpp"
#include "smkl/numlin.hpp"

namespace smkl {

struct BankOptions {
    /// PSD check: min eigenvalue >= -psd_rel_tol * max eigenvalue.
    double psd_rel_tol = 1e-8;
    /// Enforce diag <= 1 + 1e-12 (normalized banks).
    bool require_unit_diagonal = true;
    std::optional<double> rank_tol;
};

/// m validated Gram matrices over the same N samples, each with its spectral
/// cache. Kernels are addressed by bank index; ids are unique.
class KernelBank {
public:
    struct Entry {
        std::string id;
        Matrix gram;
        SpectralCache cache;
    };

    KernelBank() = default;

    /// Spectral caches are built in parallel over kernels.
    static KernelBank from_grams(std::vector<GramMatrix> grams, const BankOptions& options = {});
    static KernelBank from_grams_serial(std::vector<GramMatrix> grams, const BankOptions& options = {});

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    Index n_samples() const { return n_; }

    const Entry& operator[](std::size_t j) const { return entries_.at(j); }
    const std::string& id(std::size_t j) const { return entries_.at(j).id; }
    const Matrix& gram(std::size_t j) const { return entries_.at(j).gram; }
    const SpectralCache& cache(std::size_t j) const { return entries_.at(j).cache; }

    std::optional<std::size_t> index_of(const std::string& id) const;
    /// index_of or a validation error naming the id.
    std::size_t require_index(const std::string& id) const;

    std::vector<const SpectralCache*> caches() const;
    std::vector<std::string> ids(const std::vector<std::size_t>& indices) const;

    /// Entrywise-equal Gram matrices.
    bool identical(std::size_t i, std::size_t j) const;

    /// Kernels at `indices`, in the given order.
    KernelBank subset(const std::vector<std::size_t>& indices) const;

private:
    static KernelBank assemble(std::vector<GramMatrix> grams, const BankOptions& options, bool parallel);

    std::vector<Entry> entries_;
    Index n_ = 0;
};

}  // namespace smkl
