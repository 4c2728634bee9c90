#include <doctest.h>

#include <numeric>

#include "chfsi/errors.hpp"
#include "chfsi/linalg.hpp"
#include "oracles.hpp"

using namespace chfsi;

TEST_SUITE("gemm") {
    TEST_CASE("identity times X is X") {
        const Matrix x = random_block(3, 4, 1);
        Matrix c(3, 4);
        gemm(1.0, Matrix::identity(3), x, 0.0, c);
        CHECK(c == x);
    }

    TEST_CASE("alpha zero and beta one leave C untouched") {
        const Matrix a = random_block(4, 5, 2);
        const Matrix b = random_block(5, 3, 3);
        const Matrix x = random_block(4, 3, 4);
        Matrix c(x);
        gemm(0.0, a, b, 1.0, c);
        CHECK(oracle::max_abs_diff(c, x) == 0.0);
    }

    TEST_CASE("7x5 times 5x3 matches the triple loop") {
        const Matrix a = random_block(7, 5, 5);
        const Matrix b = random_block(5, 3, 6);
        Matrix c(7, 3);
        gemm(1.0, a, b, 0.0, c);
        const Matrix ref = oracle::naive_product(a, b);
        CHECK(oracle::fro_diff(c, ref) <= 1e-13 * oracle::fro(ref));
    }

    TEST_CASE("adjoint operands and complex scalars") {
        const Matrix a = random_block(6, 9, 7);
        const Matrix b = random_block(4, 6, 8);
        const Matrix c0 = random_block(9, 4, 9);
        const Complex alpha(0.3, -1.2), beta(-0.7, 0.25);
        Matrix c(c0);
        gemm(alpha, a, Op::ConjTrans, b, Op::ConjTrans, beta, c);
        const Matrix ref = oracle::naive_gemm(alpha, a, Op::ConjTrans, b, Op::ConjTrans, beta, c0);
        CHECK(oracle::fro_diff(c, ref) <= 1e-13 * oracle::fro(ref));
    }

    TEST_CASE("dimension mismatch is a contract violation") {
        const Matrix a(3, 4), b(5, 2);
        Matrix c(3, 2);
        CHECK_THROWS_AS(gemm(1.0, a, b, 0.0, c), ContractViolation);
        Matrix wrong(4, 2);
        CHECK_THROWS_AS(gemm(1.0, a, Matrix(4, 2), 0.0, wrong), ContractViolation);
    }

    TEST_CASE("tiling and worker invariance up to 128x128") {
        for (Index n : {1, 17, 64, 128}) {
            const Matrix a = random_block(n, n, 100 + n);
            const Matrix b = random_block(n, n, 200 + n);
            Matrix zero(n, n);
            const Matrix ref = oracle::naive_gemm(1.0, a, Op::None, b, Op::None, 0.0, zero);
            for (int workers : {1, 2, 3}) {
                for (Index tile : {0, 1, 5, 32, 1000}) {
                    Matrix c(n, n);
                    gemm(1.0, a, b, 0.0, c, Exec{workers, tile});
                    CHECK(oracle::fro_diff(c, ref) <= 1e-13 * oracle::fro(ref));
                }
            }
        }
    }

    TEST_CASE("fixed worker count is bit reproducible") {
        const Matrix a = random_block(90, 90, 11);
        const Matrix b = random_block(90, 40, 12);
        Matrix c1(90, 40), c2(90, 40);
        gemm(1.0, a, b, 0.0, c1, Exec{3, 0});
        gemm(1.0, a, b, 0.0, c2, Exec{3, 0});
        CHECK(c1 == c2);
    }
}

TEST_SUITE("cholesky") {
    TEST_CASE("identity factor") {
        const auto l = cholesky_factor(HermitianMatrix::symmetrize(Matrix::identity(3)));
        CHECK(l.lower() == Matrix::identity(3));
    }

    TEST_CASE("diagonal square roots") {
        const auto l = cholesky_factor(oracle::diagonal({4.0, 9.0}));
        CHECK(l.lower()(0, 0) == Complex(2.0));
        CHECK(l.lower()(1, 1) == Complex(3.0));
        CHECK(l.lower()(1, 0) == Complex(0.0));
    }

    TEST_CASE("indefinite input names pivot 2") {
        try {
            cholesky_factor(oracle::diagonal({1.0, -1.0}));
            FAIL("expected NotPositiveDefinite");
        } catch (const NotPositiveDefinite& e) {
            CHECK(e.pivot() == 2);
        }
    }

    TEST_CASE("random SPD 6x6 reconstruction") {
        const auto b = oracle::random_spd(6, 77);
        const auto l = cholesky_factor(b);
        const Matrix llh = oracle::naive_product(l.lower(), oracle::naive_adjoint(l.lower()));
        CHECK(oracle::fro_diff(llh, b.matrix()) <= 1e-12 * oracle::fro(b.matrix()));
    }

    TEST_CASE("round trip on 200 random SPD matrices") {
        int failures = 0;
        for (int s = 0; s < 200; ++s) {
            const Index n = 1 + (s * 37) % 64;
            const auto b = oracle::random_spd(n, 1000 + s);
            const auto l = cholesky_factor(b);
            const Matrix& lm = l.lower();
            for (Index j = 0; j < n; ++j) {
                if (!(lm(j, j).real() > 0.0 && lm(j, j).imag() == 0.0)) ++failures;
                for (Index i = 0; i < j; ++i)
                    if (lm(i, j) != Complex(0.0)) ++failures;
            }
            const Matrix llh = oracle::naive_product(lm, oracle::naive_adjoint(lm));
            if (!(oracle::fro_diff(llh, b.matrix()) <= 1e-12 * oracle::fro(b.matrix()))) ++failures;
        }
        CHECK(failures == 0);
    }
}

TEST_SUITE("householder_qr") {
    TEST_CASE("orthonormal input is returned up to column phases") {
        const Matrix y = householder_qr(random_block(12, 4, 3));
        const Matrix q = householder_qr(y);
        const Matrix g = oracle::naive_product(oracle::naive_adjoint(q), y);
        for (Index j = 0; j < 4; ++j)
            for (Index i = 0; i < 4; ++i) CHECK(std::abs(std::abs(g(i, j)) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }

    TEST_CASE("span of e1 and e1 + e2") {
        Matrix y(3, 2);
        y(0, 0) = 1.0;
        y(0, 1) = 1.0;
        y(1, 1) = 1.0;
        const Matrix q = householder_qr(y);
        const Matrix p = oracle::naive_product(q, oracle::naive_adjoint(q));
        CHECK(std::abs(p(0, 0) - 1.0) < 1e-14);
        CHECK(std::abs(p(1, 1) - 1.0) < 1e-14);
        CHECK(std::abs(p(2, 2)) < 1e-14);
        CHECK(std::abs(p(0, 1)) < 1e-14);
    }

    TEST_CASE("random 50x8 block spans the same range") {
        const Matrix y = random_block(50, 8, 9);
        const Matrix q = householder_qr(y);
        CHECK(oracle::orthonormality(q) <= 1e-12 * std::sqrt(8.0));
        const Matrix pq = oracle::naive_product(q, oracle::naive_adjoint(q));
        CHECK(oracle::fro_diff(oracle::range_projector(y), pq) <= 1e-10);
    }

    TEST_CASE("collapsed column is reported") {
        Matrix y = random_block(10, 3, 4);
        for (Index i = 0; i < 10; ++i) y(i, 2) = 2.0 * y(i, 0) - Complex(0.0, 1.0) * y(i, 1);
        try {
            householder_qr(y);
            FAIL("expected RankDeficient");
        } catch (const RankDeficient& e) {
            CHECK(e.column() == 2);
        }
    }

    TEST_CASE("worker counts agree") {
        const Matrix y = random_block(80, 12, 10);
        const Matrix q1 = householder_qr(y, Exec{1, 0});
        const Matrix q3 = householder_qr(y, Exec{3, 0});
        CHECK(oracle::max_abs_diff(q1, q3) <= 1e-13);
    }
}

TEST_SUITE("oracle_eig") {
    TEST_CASE("diag(3, 1, 2)") {
        const auto e = oracle_eig(oracle::diagonal({3.0, 1.0, 2.0}));
        CHECK(e.values == std::vector<double>{1.0, 2.0, 3.0});
        // Columns are a permutation of the identity columns, up to phase.
        const Index perm[] = {1, 2, 0};
        for (Index j = 0; j < 3; ++j) CHECK(std::abs(std::abs(e.vectors(perm[j], j)) - 1.0) < 1e-15);
    }

    TEST_CASE("scalar matrix") {
        Matrix m = Matrix::identity(4);
        for (Complex& z : m.values()) z *= 2.5;
        const auto e = oracle_eig(HermitianMatrix::symmetrize(m));
        for (double v : e.values) CHECK(v == 2.5);
    }

    TEST_CASE("Pauli X") {
        Matrix m(2, 2);
        m(0, 1) = 1.0;
        m(1, 0) = 1.0;
        const auto e = oracle_eig(HermitianMatrix::symmetrize(m));
        CHECK(std::abs(e.values[0] + 1.0) < 1e-15);
        CHECK(std::abs(e.values[1] - 1.0) < 1e-15);
    }

    TEST_CASE("diagonal input reproduces sorted entries") {
        std::vector<double> d;
        for (int i = 0; i < 30; ++i) d.push_back(std::sin(1.7 * i) * 5.0);
        const auto e = oracle_eig(oracle::diagonal(d));
        std::sort(d.begin(), d.end());
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(e.values[i] - d[i]) <= 1e-14);
    }

    TEST_CASE("random Hermitian multiply-back, trace and orthonormality") {
        for (Index n : {1, 2, 5, 20, 60}) {
            const auto h = oracle::random_hermitian(n, 500 + n);
            const auto e = oracle_eig(h);
            CHECK(std::is_sorted(e.values.begin(), e.values.end()));
            Matrix vl(e.vectors);
            for (Index j = 0; j < n; ++j)
                for (Complex& z : vl.col(j)) z *= e.values[static_cast<std::size_t>(j)];
            const Matrix hv = oracle::naive_product(h.matrix(), e.vectors);
            const double hf = oracle::fro(h.matrix());
            CHECK(oracle::fro_diff(hv, vl) <= 1e-10 * hf);
            CHECK(oracle::orthonormality(e.vectors) <= 1e-12 * std::sqrt(static_cast<double>(n)));
            Complex tr = 0.0;
            for (Index i = 0; i < n; ++i) tr += h.matrix()(i, i);
            const double sum = std::accumulate(e.values.begin(), e.values.end(), 0.0);
            CHECK(std::abs(tr.real() - sum) <= 1e-11 * hf);
        }
    }

    TEST_CASE("degenerate spectrum with complex couplings") {
        // U diag(1,1,1,4,4) U^H for a random unitary U.
        const Matrix u = householder_qr(random_block(5, 5, 31));
        Matrix ud(u);
        const double d[] = {1, 1, 1, 4, 4};
        for (Index j = 0; j < 5; ++j)
            for (Complex& z : ud.col(j)) z *= d[j];
        const auto h = HermitianMatrix::symmetrize(oracle::naive_product(ud, oracle::naive_adjoint(u)));
        const auto e = oracle_eig(h);
        for (Index j = 0; j < 5; ++j) CHECK(std::abs(e.values[static_cast<std::size_t>(j)] - d[j]) < 1e-13);
    }
}

TEST_SUITE("triangular_solve") {
    TEST_CASE("identity factor leaves X unchanged") {
        const auto l = cholesky_factor(HermitianMatrix::symmetrize(Matrix::identity(4)));
        const Matrix x = random_block(4, 3, 1);
        for (Op op : {Op::None, Op::ConjTrans}) CHECK(triangular_solve(l, x, Side::Left, op) == x);
    }

    TEST_CASE("diag(2, 4) scaling") {
        const auto l = cholesky_factor(oracle::diagonal({4.0, 16.0}));
        Matrix x(2, 1);
        x(0, 0) = 2.0;
        x(1, 0) = 4.0;
        const Matrix z = triangular_solve(l, x, Side::Left, Op::None);
        CHECK(z(0, 0) == Complex(1.0));
        CHECK(z(1, 0) == Complex(1.0));
    }

    TEST_CASE("multiply-back for all four variants") {
        const auto b = oracle::random_spd(9, 42);
        const auto l = cholesky_factor(b);
        const Matrix& lm = l.lower();
        const Matrix lh = oracle::naive_adjoint(lm);
        const Matrix xl = random_block(9, 4, 43);
        const Matrix xr = random_block(4, 9, 44);
        const double tol = 1e-12;

        const Matrix z1 = triangular_solve(l, xl, Side::Left, Op::None);
        CHECK(oracle::fro_diff(oracle::naive_product(lm, z1), xl) <= tol * oracle::fro(xl));
        const Matrix z2 = triangular_solve(l, xl, Side::Left, Op::ConjTrans);
        CHECK(oracle::fro_diff(oracle::naive_product(lh, z2), xl) <= tol * oracle::fro(xl));
        const Matrix z3 = triangular_solve(l, xr, Side::Right, Op::None);
        CHECK(oracle::fro_diff(oracle::naive_product(z3, lm), xr) <= tol * oracle::fro(xr));
        const Matrix z4 = triangular_solve(l, xr, Side::Right, Op::ConjTrans);
        CHECK(oracle::fro_diff(oracle::naive_product(z4, lh), xr) <= tol * oracle::fro(xr));
    }

    TEST_CASE("dimension mismatch") {
        const auto l = cholesky_factor(oracle::random_spd(5, 1));
        CHECK_THROWS_AS(triangular_solve(l, Matrix(4, 2), Side::Left, Op::None), ContractViolation);
        CHECK_THROWS_AS(triangular_solve(l, Matrix(2, 4), Side::Right, Op::None), ContractViolation);
    }
}

TEST_SUITE("matrix types") {
    TEST_CASE("from_raw rejects asymmetric data and symmetrizes small deviations") {
        Matrix m = random_block(4, 4, 5);
        CHECK_THROWS_AS(HermitianMatrix::from_raw(m), ContractViolation);
        const auto h = oracle::random_hermitian(4, 6);
        Matrix noisy(h.matrix());
        noisy(1, 0) += Complex(1e-16, 0.0);
        noisy(2, 2) += Complex(0.0, 1e-16);
        const auto hs = HermitianMatrix::from_raw(noisy);
        CHECK(hermitian_deviation(hs.view()) == 0.0);
        CHECK(hs.matrix()(2, 2).imag() == 0.0);
    }

    TEST_CASE("random_block is seeded") {
        CHECK(random_block(6, 3, 9) == random_block(6, 3, 9));
        CHECK_FALSE(random_block(6, 3, 9) == random_block(6, 3, 10));
    }
}
