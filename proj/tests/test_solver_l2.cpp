#include "doctest.h"
#include "fixtures.hpp"
#include "smkl/datagen.hpp"
#include "smkl/diagnostics.hpp"
#include "smkl/error.hpp"
#include "smkl/oracles.hpp"
#include "smkl/solver_l2.hpp"

using namespace smkl;

TEST_CASE("selection examples") {
    const Index n = 6;
    std::mt19937_64 rng(1);
    const Vector r = fixtures::gaussian_vector(rng, n);
    const auto one = KernelBank::from_grams({{"a", Matrix::Identity(n, n)}});
    CHECK(l2::select_kernel_l2(one, r).index == 0);

    const auto g = fixtures::low_rank_gram(rng, n, 2, "g");
    const auto dup = KernelBank::from_grams({{"x", Matrix::Zero(n, n)}, {"g", g.entries}, {"g2", g.entries}});
    CHECK(l2::select_kernel_l2(dup, r).index == 1);

    const auto mixed = KernelBank::from_grams({{"zero", Matrix::Zero(n, n)}, {"id", Matrix::Identity(n, n)}});
    CHECK(l2::select_kernel_l2(mixed, r).index == 1);
}

TEST_CASE("one-step exact fit for N = 1") {
    const auto bank = KernelBank::from_grams({{"k", Matrix::Ones(1, 1)}});
    const Vector y = Vector::Ones(1);
    const auto step = l2::l2_step(Expansion{}, bank, y, {});
    REQUIRE(step.record);
    CHECK(step.f.block(0)(0) == 1.0);
    CHECK(step.record->loss_after == 0.0);
    CHECK(step.record->loss_before == 0.5);
}

TEST_CASE("converged signal when no projected gradient remains") {
    const Index n = 4;
    Vector y(n);
    y << 1, -1, 1, 1;
    const auto bank = KernelBank::from_grams({{"id", Matrix::Identity(n, n)}});
    Expansion f;
    f.set(0, y);
    CHECK_FALSE(l2::l2_step(f, bank, y, {}).record);

    // Residual orthogonal to both ranges.
    Matrix a = Matrix::Zero(n, n);
    a(0, 0) = 1.0;
    Matrix b = Matrix::Zero(n, n);
    b(1, 1) = 1.0;
    const auto orth = KernelBank::from_grams({{"a", a}, {"b", b}});
    Vector z(n);
    z << 0, 0, 1, -1;
    Expansion none;
    const auto res = l2::l2_step(none, orth, z, {});
    CHECK_FALSE(res.record);
    CHECK(res.f.blocks().empty());

    const auto run = l2::solve_l2(orth, Vector{{1, 1, -1, 1}}, {1});
    CHECK(run.trace.iterations.size() == 1);
}

TEST_CASE("solve_l2 with zero residual returns an empty trace") {
    const Index n = 3;
    Vector y(n);
    y << 1, 1, -1;
    // K_j alpha = y needs a kernel that already fits: use a bank whose
    // ranges miss y entirely, so every gradient is exactly zero.
    Matrix k = Matrix::Zero(n, n);
    k(0, 0) = k(1, 1) = 1.0;
    k(0, 1) = k(1, 0) = -1.0;
    k *= 0.5;
    const auto bank = KernelBank::from_grams({{"k", k}});
    const auto run = l2::solve_l2(bank, y, {1});
    CHECK(run.trace.iterations.empty());
    CHECK(run.trace.converged);
    CHECK(run.f.support().empty());
}

TEST_CASE("single full-rank kernel follows the matrix-power closed form") {
    std::mt19937_64 rng(2);
    const Index n = 10;
    KernelSpec s;
    s.id = "rbf";
    s.family = KernelFamily::rbf;
    s.bandwidth = 0.4;
    const Matrix x = 3.0 * fixtures::gaussian_matrix(rng, n, 2);
    const auto bank = KernelBank::from_grams({normalize(gram(s, x))});
    REQUIRE(bank.cache(0).rank() == n);
    const Vector y = fixtures::random_labels(rng, n);
    const auto run = l2::solve_l2(bank, y, {12});
    REQUIRE(run.trace.iterations.size() == 12);
    const Matrix step = Matrix::Identity(n, n) - bank.gram(0) / static_cast<double>(n);
    Vector r = y;
    for (std::size_t k = 0; k < 12; ++k) {
        r = step * r;
        const double oracle = r.squaredNorm() / (2.0 * n);
        CHECK(std::abs(run.trace.iterations[k].loss_after - oracle) <= 1e-12);
    }
}

TEST_CASE("trace invariants, decrease identity and norm budget on random runs") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto bank = trial % 2 ? fixtures::rbf_bank(rng, 30, 6) : fixtures::low_rank_bank(rng, 30, 6, 3);
        const Vector y = fixtures::random_labels(rng, 30);
        const std::size_t d = 8;
        Expansion f;
        std::size_t last_support = 0;
        double last_after = 0.5;
        for (std::size_t k = 1; k <= d; ++k) {
            const auto step = l2::l2_step(f, bank, y, {d}, k);
            REQUIRE(step.record);
            const auto& rec = *step.record;
            CHECK(rec.loss_after <= rec.loss_before);
            CHECK(std::abs(rec.loss_before - last_after) <= 1e-15);
            const double identity = rec.grad_h_selected * rec.grad_h_selected -
                                    0.5 * rec.grad_l2_selected * rec.grad_l2_selected;
            const double gap = std::abs((rec.loss_before - rec.loss_after) - identity);
            if (trial % 2) {
                // rbf spectra decay smoothly through rank_tol; the dropped tail
                // (eigenvalues <= tol) shifts the decrease by at most
                // tol |r|^2 / N^2 + tol^2 |r|^2 / (2 N^3).
                const double tol = bank.cache(rec.selected).rank_tol;
                const double r2 = 2.0 * 30.0 * rec.loss_before;
                CHECK(gap <= tol * r2 / 900.0 + tol * tol * r2 / 54000.0 + 1e-15);
            } else {
                CHECK(gap <= 1e-9 * std::abs(identity));
            }
            CHECK(rec.loss_before - rec.loss_after >= 0.5 * rec.grad_l2_selected * rec.grad_l2_selected - 1e-15);
            CHECK(rec.support_size >= last_support);
            CHECK(rec.support_size <= std::min<std::size_t>(k, bank.size()));
            // The update lies in the selected kernel's range.
            const Vector delta = step.f.block(rec.selected) -
                                 (f.has(rec.selected) ? f.block(rec.selected) : Vector::Zero(30));
            const Vector off = delta - numlin::project_onto_range(bank.cache(rec.selected), delta);
            CHECK(off.norm() <= 1e-8 * delta.norm());
            last_support = rec.support_size;
            last_after = rec.loss_after;
            f = step.f;
        }
        CHECK(objective::total_norm(f, bank) <= std::sqrt(static_cast<double>(d)) + 1e-8);
        const auto run = l2::solve_l2(bank, y, {d});
        CHECK(run.trace.iterations.back().loss_after == last_after);
    }
}

TEST_CASE("appending a duplicate kernel leaves the run bit-identical") {
    std::mt19937_64 rng(4);
    const auto base = fixtures::rbf_bank(rng, 25, 5);
    const Vector y = fixtures::random_labels(rng, 25);
    std::vector<GramMatrix> grams;
    for (std::size_t j = 0; j < base.size(); ++j) grams.push_back({base.id(j), base.gram(j)});
    for (std::size_t j = 0; j < base.size(); ++j) grams.push_back({base.id(j) + "_dup", base.gram(j)});
    const auto extended = KernelBank::from_grams(grams);
    const auto a = l2::solve_l2(base, y, {10});
    const auto b = l2::solve_l2(extended, y, {10});
    REQUIRE(a.trace.iterations.size() == b.trace.iterations.size());
    for (std::size_t k = 0; k < a.trace.iterations.size(); ++k) {
        CHECK(a.trace.iterations[k].selected == b.trace.iterations[k].selected);
        CHECK(a.trace.iterations[k].loss_after == b.trace.iterations[k].loss_after);
    }
}

TEST_CASE("orthogonal planted instance decays geometrically") {
    datagen::SyntheticSpec spec;
    spec.n_samples = 120;
    spec.n_kernels = 20;
    spec.true_support_size = 3;
    spec.noise_std = 0.1;
    spec.seed = 1;
    const auto inst = datagen::generate(spec);
    const auto run = l2::solve_l2(inst.bank, inst.data.labels, {10});
    const auto oracle = oracles::best_subset(inst.bank, inst.data.labels, 10);
    const auto fit = diagnostics::fit_rate(run.trace, oracle.f_star_loss, 6 * oracle.epsilon_star + 1e-6);
    CHECK(fit.rate < 1.0);
    CHECK(fit.r_squared >= 0.95);
}

TEST_CASE("config validation") {
    l2::L2Config c;
    c.d = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.step_scale = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    const auto bank = KernelBank::from_grams({{"k", Matrix::Identity(2, 2)}});
    CHECK_THROWS_AS(l2::solve_l2(bank, Vector{{1, 2}}, {1}), Error);
}
