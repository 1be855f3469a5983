#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "smkl/error.hpp"
#include "smkl/kernels.hpp"

using namespace smkl;

namespace {

KernelSpec spec_of(KernelFamily family) {
    KernelSpec s;
    s.id = "k";
    s.family = family;
    return s;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("smkl_test_" + name)).string();
}

}  // namespace

TEST_CASE("linear kernel on orthonormal rows is the identity") {
    const Matrix x = Matrix::Identity(2, 2);
    const auto g = gram(spec_of(KernelFamily::linear), x);
    CHECK(g.entries == Matrix::Identity(2, 2));
}

TEST_CASE("rbf diagonal is exactly one") {
    std::mt19937_64 rng(3);
    const Matrix x = fixtures::gaussian_matrix(rng, 12, 3);
    for (double bw : {0.1, 1.0, 7.5}) {
        auto s = spec_of(KernelFamily::rbf);
        s.bandwidth = bw;
        const auto g = gram(s, x);
        for (Index i = 0; i < 12; ++i) CHECK(g.entries(i, i) == 1.0);
    }
}

TEST_CASE("polynomial degree 2 offset 0 by hand") {
    Matrix x(2, 1);
    x << 1, 2;
    auto s = spec_of(KernelFamily::polynomial);
    s.degree = 2;
    s.offset = 0.0;
    Matrix expected(2, 2);
    expected << 1, 4, 4, 16;
    CHECK(gram(s, x).entries == expected);
}

TEST_CASE("column range restricts the features") {
    Matrix x(2, 3);
    x << 1, 2, 3, 4, 5, 6;
    auto s = spec_of(KernelFamily::linear);
    s.columns = std::pair<Index, Index>{1, 3};
    Matrix expected(2, 2);
    expected << 13, 28, 28, 61;
    CHECK(gram(s, x).entries == expected);
    s.columns = std::pair<Index, Index>{1, 4};
    CHECK_THROWS_AS(gram(s, x), Error);
}

TEST_CASE("spec validation") {
    auto s = spec_of(KernelFamily::rbf);
    s.bandwidth = 0.0;
    CHECK_THROWS_AS(validate(s), Error);
    s = spec_of(KernelFamily::polynomial);
    s.degree = 0;
    CHECK_THROWS_AS(validate(s), Error);
    s = spec_of(KernelFamily::polynomial);
    s.offset = -1.0;
    CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("non-finite features are a validation error") {
    Matrix x = Matrix::Ones(3, 2);
    x(1, 1) = std::nan("");
    try {
        gram(spec_of(KernelFamily::linear), x);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
    }
}

TEST_CASE("normalize examples") {
    CHECK(normalize({"i", Matrix::Identity(3, 3)}).entries == Matrix::Identity(3, 3));
    Matrix k(2, 2);
    k << 4, 2, 2, 1;
    CHECK(normalize({"k", k}).entries == Matrix::Ones(2, 2));

    std::mt19937_64 rng(5);
    auto s = spec_of(KernelFamily::rbf);
    const auto g = gram(s, fixtures::gaussian_matrix(rng, 10, 2));
    CHECK((normalize(g).entries - g.entries).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("normalize leaves zero rows at zero and rejects degenerate rows") {
    Matrix k = Matrix::Zero(3, 3);
    k(0, 0) = 4.0;
    k(2, 2) = 9.0;
    k(0, 2) = k(2, 0) = 3.0;
    const auto n = normalize({"z", k});
    CHECK(n.entries.row(1).isZero(0.0));
    CHECK(n.entries(0, 0) == 1.0);
    CHECK(n.entries(0, 2) == doctest::Approx(0.5));

    Matrix bad = Matrix::Zero(2, 2);
    bad(1, 1) = 1.0;
    bad(0, 1) = bad(1, 0) = 0.5;
    try {
        normalize({"bad", bad});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_kernel);
    }
    CHECK(normalize({"zero", Matrix::Zero(3, 3)}).entries.isZero(0.0));
}

TEST_CASE("normalized Grams are symmetric PSD with unit diagonal") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 5 + trial * 2;
        const Matrix x = fixtures::gaussian_matrix(rng, n, 3);
        std::vector<KernelSpec> specs(3);
        specs[0] = spec_of(KernelFamily::linear);
        specs[1] = spec_of(KernelFamily::polynomial);
        specs[1].degree = 3;
        specs[1].offset = 1.0;
        specs[2] = spec_of(KernelFamily::rbf);
        specs[2].bandwidth = 0.7;
        for (const auto& s : specs) {
            const auto k = normalize(gram(s, x)).entries;
            CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
            for (Index i = 0; i < n; ++i) CHECK(k(i, i) == 1.0);
            const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(k).eigenvalues();
            CHECK(eig.minCoeff() >= -1e-8 * eig.maxCoeff());
        }
    }
}

TEST_CASE("gram is deterministic and matches its serial twin bit for bit") {
    std::mt19937_64 rng(2);
    const Matrix x = fixtures::gaussian_matrix(rng, 37, 4);
    for (auto family : {KernelFamily::linear, KernelFamily::polynomial, KernelFamily::rbf}) {
        auto s = spec_of(family);
        s.offset = 0.5;
        const auto a = gram(s, x);
        const auto b = gram(s, x);
        const auto c = gram_serial(s, x);
        CHECK(a.entries == b.entries);
        CHECK(a.entries == c.entries);
    }
}

TEST_CASE("precomputed kernels load, validate and report file errors") {
    const std::string path = temp_path("pre.txt");
    {
        std::ofstream out(path);
        out << "1, 0.5\n0.5 1\n";
    }
    KernelSpec s = spec_of(KernelFamily::precomputed);
    s.path = path;
    const auto g = gram(s, Matrix::Zero(2, 1));
    CHECK(g.entries(0, 1) == 0.5);
    CHECK_THROWS_AS(gram(s, Matrix::Zero(3, 1)), Error);

    s.path = temp_path("missing.txt");
    std::filesystem::remove(s.path);
    try {
        gram(s, Matrix::Zero(2, 1));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
    }

    {
        std::ofstream out(path);
        out << "1 0 0\n0 1\n";
    }
    s.path = path;
    try {
        gram(s, Matrix::Zero(2, 1));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("kernel spec text round trip") {
    const auto specs = parse_kernel_specs(
        "a linear cols=0:2\n# comment\nb rbf bandwidth=0.25 ; c polynomial degree=3 offset=1.5\n");
    REQUIRE(specs.size() == 3);
    CHECK(specs[0].columns->second == 2);
    CHECK(specs[1].bandwidth == 0.25);
    CHECK(specs[2].degree == 3);
    for (const auto& s : specs) {
        const auto again = parse_kernel_specs(format_kernel_spec(s));
        REQUIRE(again.size() == 1);
        CHECK(format_kernel_spec(again[0]) == format_kernel_spec(s));
    }
    CHECK_THROWS_AS(parse_kernel_specs("a linear\na rbf"), Error);
    CHECK_THROWS_AS(parse_kernel_specs("a sigmoid"), Error);
    CHECK_THROWS_AS(parse_kernel_specs("a rbf width=2"), Error);
}
