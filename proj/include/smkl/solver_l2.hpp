#pragma once

#include <optional>

#include "smkl/objective.hpp"
#include "smkl/trace.hpp"

namespace smkl::l2 {

struct L2Config {
    std::size_t d = 1;        ///< iteration budget
    double step_scale = 1.0;  ///< in (0, 1]
    double grad_tol = 1e-12;

    void validate() const;
};

/// argmax_j |grad_j E_N|_{l2(D)}; ties go to the smallest index.
objective::Pick select_kernel_l2(const KernelBank& bank, const Vector& r);

struct StepResult {
    Expansion f;
    /// Absent when the selected gradient is at or below grad_tol; f is then
    /// returned unchanged.
    std::optional<IterationRecord> record;
};

/// One greedy step: alpha_j -= (step_scale / N) * U_j U_j^T r for the
/// selected kernel j. `k` is stored in the record.
StepResult l2_step(const Expansion& f, const KernelBank& bank, const Vector& y, const L2Config& config,
                   std::size_t k = 1);

struct L2Result {
    Expansion f;
    SolverTrace trace;
};

/// Up to config.d steps from f = 0.
L2Result solve_l2(const KernelBank& bank, const Vector& y, const L2Config& config);

}  // namespace smkl::l2
