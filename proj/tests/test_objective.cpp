#include "doctest.h"
#include "fixtures.hpp"
#include "smkl/error.hpp"
#include "smkl/objective.hpp"

using namespace smkl;

namespace {

KernelBank single(const Matrix& k, BankOptions opts = {}) { return KernelBank::from_grams({{"k", k}}, opts); }

}  // namespace

TEST_CASE("predict examples") {
    std::mt19937_64 rng(1);
    const auto bank = fixtures::low_rank_bank(rng, 10, 3, 4);
    CHECK(objective::predict(Expansion{}, bank).isZero(0.0));

    const Vector y = fixtures::random_labels(rng, 10);
    Expansion f;
    f.set(0, y);
    CHECK(objective::predict(f, single(Matrix::Identity(10, 10))) == y);

    Expansion a, b, both;
    const Vector a0 = fixtures::gaussian_vector(rng, 10);
    const Vector a2 = fixtures::gaussian_vector(rng, 10);
    a.set(0, a0);
    b.set(2, a2);
    both.set(0, a0);
    both.set(2, a2);
    CHECK((objective::predict(both, bank) - objective::predict(a, bank) - objective::predict(b, bank)).norm() <= 1e-12);

    Expansion bad;
    bad.set(7, a0);
    CHECK_THROWS_AS(objective::predict(bad, bank), Error);
}

TEST_CASE("empirical loss examples") {
    std::mt19937_64 rng(2);
    const auto bank = fixtures::low_rank_bank(rng, 8, 2, 3);
    const Vector y = fixtures::random_labels(rng, 8);
    CHECK(objective::empirical_loss(Expansion{}, bank, y) == 0.5);

    Expansion fit;
    fit.set(0, y);
    CHECK(objective::empirical_loss(fit, single(Matrix::Identity(8, 8)), y) == 0.0);

    Expansion one;
    one.set(0, Vector::Ones(1));
    CHECK(objective::empirical_loss(one, single(Matrix::Ones(1, 1)), -Vector::Ones(1)) == 2.0);
}

TEST_CASE("support tracks nonzero blocks") {
    Expansion f;
    f.set(3, Vector::Zero(4));
    f.set(1, Vector::Ones(4));
    CHECK(f.support() == std::vector<std::size_t>{1});
}

TEST_CASE("label validation names the row") {
    Vector y(3);
    y << 1, 0, -1;
    try {
        objective::validate_labels(y);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("gradient norm examples") {
    const Index n = 9;
    std::mt19937_64 rng(3);
    const Vector y = fixtures::random_labels(rng, n);
    const Matrix id = Matrix::Identity(n, n);
    CHECK(objective::grad_functional_norm(id, Vector::Zero(n)) == 0.0);
    CHECK(objective::grad_l2_norm(id, Vector::Zero(n)) == 0.0);
    CHECK(objective::grad_functional_norm(id, -y) == doctest::Approx(1.0 / std::sqrt(9.0)).epsilon(1e-15));
    CHECK(objective::grad_l2_norm(id, -y) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("functional norm examples and eigenbasis oracle") {
    const Matrix id = Matrix::Identity(4, 4);
    CHECK(objective::functional_norm(Vector::Zero(4), id) == 0.0);
    CHECK(objective::functional_norm(Vector::Unit(4, 0), id) == 1.0);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = fixtures::low_rank_gram(rng, 12, 5, "g");
        const Vector alpha = fixtures::gaussian_vector(rng, 12);
        Eigen::JacobiSVD<Matrix> svd(g.entries, Eigen::ComputeFullU);
        const Vector coords = svd.matrixU().transpose() * alpha;
        const double oracle = std::sqrt(coords.dot(svd.singularValues().cwiseProduct(coords)));
        CHECK(std::abs(objective::functional_norm(alpha, g.entries) - oracle) <= 1e-10 * std::max(1.0, oracle));
    }
}

TEST_CASE("gradient matches a finite-difference directional derivative") {
    std::mt19937_64 rng(5);
    const auto bank = fixtures::rbf_bank(rng, 15, 3);
    const Vector y = fixtures::random_labels(rng, 15);
    Expansion f;
    for (std::size_t j = 0; j < 3; ++j) f.set(j, 0.1 * fixtures::gaussian_vector(rng, 15));
    const Vector r = objective::residual(f, bank, y);
    const double h = 1e-6;
    for (std::size_t j = 0; j < 3; ++j) {
        // Coordinate derivatives: dE/d alpha_{j,i} = (1/N) (K_j r)_i.
        for (Index i = 0; i < 15; i += 4) {
            Expansion up = f, down = f;
            up.block(j, 15)(i) += h;
            down.block(j, 15)(i) -= h;
            const double fd = (objective::empirical_loss(up, bank, y) - objective::empirical_loss(down, bank, y)) / (2 * h);
            const double exact = (bank.gram(j) * r)(i) / 15.0;
            CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
        }
        // Steepest ascent in H_j is along g = r/N with |g|_H = grad_functional_norm,
        // so the directional derivative along g/|g|_H equals that norm.
        const double gnorm = objective::grad_functional_norm(bank.gram(j), r);
        const Vector dir = (r / 15.0) / gnorm;
        Expansion up = f, down = f;
        up.block(j, 15) += h * dir;
        down.block(j, 15) -= h * dir;
        const double fd = (objective::empirical_loss(up, bank, y) - objective::empirical_loss(down, bank, y)) / (2 * h);
        CHECK(std::abs(fd - gnorm) <= 1e-6);
    }
}

TEST_CASE("norm dominance on normalized banks") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto bank = trial % 2 ? fixtures::rbf_bank(rng, 20, 4) : fixtures::low_rank_bank(rng, 20, 4, 3);
        const Vector r = fixtures::gaussian_vector(rng, 20);
        for (std::size_t j = 0; j < bank.size(); ++j) {
            CHECK(objective::grad_l2_norm(bank.gram(j), r) <= objective::grad_functional_norm(bank.gram(j), r) + 1e-12);
        }
    }
}

TEST_CASE("loss is invariant to null-space coefficient changes") {
    std::mt19937_64 rng(7);
    const auto bank = fixtures::low_rank_bank(rng, 12, 2, 3);
    const Vector y = fixtures::random_labels(rng, 12);
    Expansion f;
    f.set(0, fixtures::gaussian_vector(rng, 12));
    const Vector v = fixtures::gaussian_vector(rng, 12);
    const Vector null_part = v - numlin::project_onto_range(bank.cache(0), v);
    Expansion g = f;
    g.block(0, 12) += null_part;
    CHECK(std::abs(objective::empirical_loss(f, bank, y) - objective::empirical_loss(g, bank, y)) <= 1e-10);
}

TEST_CASE("negative quadratic forms beyond tolerance raise psd_violation") {
    Matrix k = Matrix::Identity(2, 2);
    k(0, 1) = k(1, 0) = 2.0;  // eigenvalue -1
    Vector r(2);
    r << 1, -1;
    try {
        objective::grad_functional_norm(k, r);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::psd_violation);
    }
}

TEST_CASE("parallel scoring is bit-identical and argmax prefers the first index") {
    std::mt19937_64 rng(8);
    const auto bank = fixtures::rbf_bank(rng, 40, 11);
    const Vector r = fixtures::gaussian_vector(rng, 40);
    CHECK(objective::functional_scores(bank, r) == objective::functional_scores_serial(bank, r));
    CHECK(objective::l2_scores(bank, r) == objective::l2_scores_serial(bank, r));
    CHECK(objective::argmax_first({1.0, 3.0, 3.0, 2.0}).index == 1);
    CHECK(objective::argmax_first({5.0}).index == 0);
}
