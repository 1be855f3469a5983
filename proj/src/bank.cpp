#include "smkl/bank.hpp"

#include <algorithm>
#include <unordered_set>

#include "smkl/error.hpp"
#include "smkl/parallel.hpp"

namespace smkl {

KernelBank KernelBank::from_grams(std::vector<GramMatrix> grams, const BankOptions& options) {
    return assemble(std::move(grams), options, true);
}

KernelBank KernelBank::from_grams_serial(std::vector<GramMatrix> grams, const BankOptions& options) {
    return assemble(std::move(grams), options, false);
}

KernelBank KernelBank::assemble(std::vector<GramMatrix> grams, const BankOptions& options, bool parallel) {
    require(!grams.empty(), ErrorKind::validation, "kernel bank is empty");
    const Index n = grams.front().size();
    require(n >= 1, ErrorKind::validation, "kernel bank has zero samples");
    std::unordered_set<std::string> seen;
    for (const auto& g : grams) {
        require(seen.insert(g.id).second, ErrorKind::validation, "duplicate kernel id '" + g.id + "'");
        validate_gram(g);
        require(g.size() == n, ErrorKind::validation,
                "kernel '" + g.id + "' is " + std::to_string(g.size()) + "x" + std::to_string(g.size()) +
                    ", expected " + std::to_string(n));
        if (options.require_unit_diagonal) {
            require(g.entries.diagonal().maxCoeff() <= 1.0 + 1e-12, ErrorKind::validation,
                    "kernel '" + g.id + "': diagonal exceeds 1 (bank must be normalized)");
        }
    }

    KernelBank bank;
    bank.n_ = n;
    bank.entries_.resize(grams.size());
    auto build = [&](std::ptrdiff_t j) {
        auto& e = bank.entries_[static_cast<std::size_t>(j)];
        e.cache = numlin::spectral_cache(grams[j], options.rank_tol);
        e.id = std::move(grams[j].id);
        e.gram = std::move(grams[j].entries);
    };
    const auto m = static_cast<std::ptrdiff_t>(grams.size());
    if (parallel) {
        parallel_for(m, build);
    } else {
        for (std::ptrdiff_t j = 0; j < m; ++j) build(j);
    }

    for (const auto& e : bank.entries_) {
        const double floor = -options.psd_rel_tol * std::max(e.cache.max_eigenvalue, 0.0) - 1e-14;
        require(e.cache.min_eigenvalue >= floor, ErrorKind::psd_violation,
                "kernel '" + e.id + "' is not positive semidefinite (min eigenvalue " +
                    std::to_string(e.cache.min_eigenvalue) + ")");
    }
    return bank;
}

std::optional<std::size_t> KernelBank::index_of(const std::string& id) const {
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (entries_[j].id == id) return j;
    }
    return std::nullopt;
}

std::size_t KernelBank::require_index(const std::string& id) const {
    auto j = index_of(id);
    require(j.has_value(), ErrorKind::validation, "unknown kernel id '" + id + "'");
    return *j;
}

std::vector<const SpectralCache*> KernelBank::caches() const {
    std::vector<const SpectralCache*> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(&e.cache);
    return out;
}

std::vector<std::string> KernelBank::ids(const std::vector<std::size_t>& indices) const {
    std::vector<std::string> out;
    out.reserve(indices.size());
    for (auto j : indices) out.push_back(id(j));
    return out;
}

bool KernelBank::identical(std::size_t i, std::size_t j) const {
    const Matrix& a = gram(i);
    const Matrix& b = gram(j);
    return a.rows() == b.rows() && std::equal(a.data(), a.data() + a.size(), b.data());
}

KernelBank KernelBank::subset(const std::vector<std::size_t>& indices) const {
    require(!indices.empty(), ErrorKind::validation, "empty kernel subset");
    KernelBank out;
    out.n_ = n_;
    std::unordered_set<std::size_t> seen;
    for (auto j : indices) {
        require(j < entries_.size(), ErrorKind::validation, "kernel index out of range");
        require(seen.insert(j).second, ErrorKind::validation, "repeated kernel index in subset");
        out.entries_.push_back(entries_[j]);
    }
    return out;
}

}  // namespace smkl
