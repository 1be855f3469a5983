#include "smkl/solver_l2.hpp"

#include <cmath>

#include "smkl/error.hpp"

namespace smkl::l2 {

void L2Config::validate() const {
    require(d >= 1, ErrorKind::validation, "d must be >= 1");
    require(step_scale > 0.0 && step_scale <= 1.0, ErrorKind::validation, "step_scale must lie in (0, 1]");
    require(grad_tol >= 0.0, ErrorKind::validation, "grad_tol must be >= 0");
}

objective::Pick select_kernel_l2(const KernelBank& bank, const Vector& r) {
    require(!bank.empty(), ErrorKind::validation, "kernel bank is empty");
    return objective::argmax_first(objective::l2_scores(bank, r));
}

StepResult l2_step(const Expansion& f, const KernelBank& bank, const Vector& y, const L2Config& config,
                   std::size_t k) {
    config.validate();
    const Vector r = objective::residual(f, bank, y);
    const auto pick = select_kernel_l2(bank, r);
    if (pick.value <= config.grad_tol) return {f, std::nullopt};

    const Index n = bank.n_samples();
    const Matrix& kj = bank.gram(pick.index);
    IterationRecord rec;
    rec.k = k;
    rec.selected = pick.index;
    rec.selected_id = bank.id(pick.index);
    rec.loss_before = objective::loss_from_residual(r);
    rec.grad_l2_selected = pick.value;
    rec.grad_h_selected = objective::grad_functional_norm(kj, r);

    StepResult out{f, std::nullopt};
    const Vector a = numlin::project_onto_range(bank.cache(pick.index), r);
    out.f.block(pick.index, n) -= (config.step_scale / static_cast<double>(n)) * a;

    rec.loss_after = objective::empirical_loss(out.f, bank, y);
    rec.support_size = out.f.support().size();
    out.record = rec;
    return out;
}

L2Result solve_l2(const KernelBank& bank, const Vector& y, const L2Config& config) {
    config.validate();
    objective::validate_labels(y);
    require(y.size() == bank.n_samples(), ErrorKind::validation, "label vector length mismatch");
    L2Result out;
    for (std::size_t k = 1; k <= config.d; ++k) {
        auto step = l2_step(out.f, bank, y, config, k);
        if (!step.record) {
            out.trace.converged = true;
            break;
        }
        out.f = std::move(step.f);
        out.trace.iterations.push_back(std::move(*step.record));
    }
    return out;
}

}  // namespace smkl::l2
