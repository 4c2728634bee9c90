#include <doctest.h>

#include "chfsi/generalized.hpp"
#include "oracles.hpp"

using namespace chfsi;

namespace {

/// Generalized eigenvalues via an explicit B^{-1/2} A B^{-1/2} built from the oracle.
std::vector<double> oracle_generalized(const HermitianMatrix& a, const HermitianMatrix& b) {
    const auto eb = oracle_eig(b);
    const Index n = a.order();
    Matrix s(eb.vectors);
    for (Index j = 0; j < n; ++j)
        for (Complex& z : s.col(j)) z /= std::sqrt(eb.values[static_cast<std::size_t>(j)]);
    // W = V diag(1/sqrt(mu)) V^H is B^{-1/2}.
    const Matrix w = oracle::naive_product(s, oracle::naive_adjoint(eb.vectors));
    const Matrix h = oracle::naive_product(oracle::naive_product(w, a.matrix()), w);
    return oracle_eig(HermitianMatrix::symmetrize(h)).values;
}

double generalized_residual(const HermitianMatrix& a, const HermitianMatrix& b, ConstMatrixView c, Index j,
                            double lambda) {
    const Matrix ac = oracle::naive_product(a.matrix(), c);
    const Matrix bc = oracle::naive_product(b.matrix(), c);
    double s = 0.0;
    for (Index i = 0; i < c.rows(); ++i) s += std::norm(ac(i, j) - lambda * bc(i, j));
    return std::sqrt(s);
}

double b_orthonormality(const HermitianMatrix& b, ConstMatrixView c) {
    const Matrix g = oracle::naive_product(oracle::naive_adjoint(c), oracle::naive_product(b.matrix(), c));
    double s = 0.0;
    for (Index j = 0; j < g.cols(); ++j)
        for (Index i = 0; i < g.rows(); ++i) s += std::norm(g(i, j) - (i == j ? 1.0 : 0.0));
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("reduce_to_standard with B = I returns A") {
    const auto a = oracle::random_hermitian(10, 1);
    const auto l = cholesky_factor(HermitianMatrix::symmetrize(Matrix::identity(10)));
    CHECK(oracle::max_abs_diff(reduce_to_standard(a, l).matrix(), a.matrix()) <= 1e-15);
}

TEST_CASE("reduce_to_standard with A = B returns I") {
    const auto b = oracle::random_spd(12, 2);
    const auto h = reduce_to_standard(b, cholesky_factor(b));
    CHECK(oracle::max_abs_diff(h.matrix(), Matrix::identity(12)) <= 1e-12);
    for (double v : oracle_eig(h).values) CHECK(std::abs(v - 1.0) <= 1e-12);
}

TEST_CASE("reduced spectrum equals the generalized spectrum, n = 40") {
    const auto a = oracle::random_hermitian(40, 3);
    const auto b = oracle::random_spd(40, 4);
    const auto h = reduce_to_standard(a, cholesky_factor(b));
    CHECK(hermitian_deviation(h.view()) == 0.0);
    const auto got = oracle_eig(h).values;
    const auto want = oracle_generalized(a, b);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10);
}

TEST_CASE("back_transform with L = I is the identity map") {
    const auto l = cholesky_factor(HermitianMatrix::symmetrize(Matrix::identity(6)));
    const Matrix y = random_block(6, 2, 5);
    CHECK(back_transform(y, l) == y);
}

TEST_CASE("back_transform with L = 2I halves e1") {
    Matrix b = Matrix::identity(5);
    for (Complex& z : b.values()) z *= 4.0;
    const auto l = cholesky_factor(HermitianMatrix::symmetrize(b));
    Matrix y(5, 1);
    y(0, 0) = 1.0;
    const Matrix c = back_transform(y, l);
    CHECK(c(0, 0) == Complex(0.5));
    for (Index i = 1; i < 5; ++i) CHECK(c(i, 0) == Complex(0.0));
}

TEST_CASE("back-transformed oracle vectors solve the pencil, n = 40") {
    const auto a = oracle::random_hermitian(40, 6);
    const auto b = oracle::random_spd(40, 7);
    const auto l = cholesky_factor(b);
    const auto e = oracle_eig(reduce_to_standard(a, l));
    const Matrix c = back_transform(e.vectors, l);
    const double scale = one_norm(a.matrix()) + one_norm(b.matrix());
    for (Index j = 0; j < 40; ++j)
        CHECK(generalized_residual(a, b, c, j, e.values[static_cast<std::size_t>(j)]) <= 1e-9 * scale);
    CHECK(b_orthonormality(b, c) <= 1e-10 * std::sqrt(40.0));
}

TEST_CASE("solve_generalized with B = I equals chfsi_solve") {
    const auto a = oracle::random_hermitian(60, 8);
    const auto id = HermitianMatrix::symmetrize(Matrix::identity(60));
    SolverConfig c;
    c.nev = 6;
    const auto g = solve_generalized(a, id, std::nullopt, c);
    const auto s = chfsi_solve(a, std::nullopt, c);
    CHECK(g.eigenvalues == s.eigenvalues);
    CHECK(g.eigenvectors == s.eigenvectors);
}

TEST_CASE("A = 2B gives eigenvalue 2 with a B-orthonormal basis") {
    const auto b = oracle::random_spd(30, 9);
    Matrix a2(b.matrix());
    for (Complex& z : a2.values()) z *= 2.0;
    SolverConfig c;
    c.nev = 4;
    const auto g = solve_generalized(HermitianMatrix::symmetrize(a2), b, std::nullopt, c);
    for (double v : g.eigenvalues) CHECK(std::abs(v - 2.0) <= 1e-12);
    CHECK(b_orthonormality(b, g.eigenvectors) <= 1e-10);
}

TEST_CASE("random pair n = 50, nev = 8 matches the oracle") {
    const auto a = oracle::random_hermitian(50, 10);
    const auto b = oracle::random_spd(50, 11);
    SolverConfig c;
    c.nev = 8;
    const auto g = solve_generalized(a, b, std::nullopt, c);
    const auto want = oracle_generalized(a, b);
    const double scale = one_norm(a.matrix()) + one_norm(b.matrix());
    for (Index j = 0; j < 8; ++j) {
        CHECK(std::abs(g.eigenvalues[j] - want[j]) <= 1e-9);
        CHECK(generalized_residual(a, b, g.eigenvectors, j, g.eigenvalues[j]) <= c.tol * scale);
    }
}

TEST_CASE("generalized warm start from the previous solution") {
    const auto a = oracle::random_hermitian(50, 12);
    const auto b = oracle::random_spd(50, 13);
    SolverConfig c;
    c.nev = 5;
    const auto first = solve_generalized(a, b, std::nullopt, c);
    const auto again = solve_generalized(a, b, first.search_block, c, first.estimates);
    CHECK(again.report.outer_iterations() == 1);
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(again.eigenvalues[j] - first.eigenvalues[j]) <= 1e-12);
}

TEST_CASE("indefinite B is reported") {
    const auto a = oracle::random_hermitian(4, 1);
    CHECK_THROWS_AS(solve_generalized(a, oracle::diagonal({1.0, 2.0, -1.0, 3.0}), std::nullopt, SolverConfig{}),
                    NotPositiveDefinite);
}
