#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace smkl {

struct IterationRecord {
    std::size_t k = 0;  ///< 1-based outer iteration
    std::size_t selected = 0;
    std::string selected_id;
    double loss_before = 0.0;
    double loss_after = 0.0;
    double grad_l2_selected = 0.0;
    double grad_h_selected = 0.0;
    std::size_t support_size = 0;
    std::optional<double> objective;  ///< regularized objective after the step (l1 only)
};

struct SolverTrace {
    std::vector<IterationRecord> iterations;
    bool converged = false;  ///< loop stopped before its iteration budget

    std::vector<double> loss_after() const {
        std::vector<double> out;
        out.reserve(iterations.size());
        for (const auto& it : iterations) out.push_back(it.loss_after);
        return out;
    }
};

}  // namespace smkl
