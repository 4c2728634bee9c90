#include "chfsi/linalg.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

#include "parallel.hpp"

namespace chfsi {

namespace {

// Parallelism is owned by for_each_tile; BLAS itself must stay sequential so
// a tile's arithmetic is fixed.
void init_blas_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

CBLAS_TRANSPOSE to_cblas(Op op) { return op == Op::None ? CblasNoTrans : CblasConjTrans; }

Index op_rows(ConstMatrixView m, Op op) { return op == Op::None ? m.rows() : m.cols(); }
Index op_cols(ConstMatrixView m, Op op) { return op == Op::None ? m.cols() : m.rows(); }

int blas_ld(Index ld) { return static_cast<int>(std::max<Index>(ld, 1)); }

}  // namespace

double hermitian_deviation(ConstMatrixView a) {
    CHFSI_REQUIRE(a.rows() == a.cols(), "hermitian check requires a square matrix");
    double scale = 0.0;
    double dev = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            scale = std::max(scale, std::abs(a(i, j)));
            dev = std::max(dev, std::abs(a(i, j) - std::conj(a(j, i))));
        }
    return scale == 0.0 ? 0.0 : dev / scale;
}

HermitianMatrix HermitianMatrix::symmetrize(Matrix raw) {
    CHFSI_REQUIRE(raw.rows() == raw.cols(), "hermitian matrix must be square");
    const Index n = raw.rows();
    for (Index j = 0; j < n; ++j) {
        raw(j, j) = raw(j, j).real();
        for (Index i = j + 1; i < n; ++i) {
            const Complex avg = 0.5 * (raw(i, j) + std::conj(raw(j, i)));
            raw(i, j) = avg;
            raw(j, i) = std::conj(avg);
        }
    }
    return HermitianMatrix(std::move(raw));
}

HermitianMatrix HermitianMatrix::from_raw(Matrix raw, double rel_tol) {
    CHFSI_REQUIRE(raw.rows() == raw.cols(), "hermitian matrix must be square");
    CHFSI_REQUIRE(hermitian_deviation(raw) <= rel_tol, "matrix is not hermitian within tolerance");
    return symmetrize(std::move(raw));
}

void gemm(Complex alpha, ConstMatrixView a, Op op_a, ConstMatrixView b, Op op_b, Complex beta,
          MatrixView c, const Exec& exec) {
    const Index m = op_rows(a, op_a);
    const Index k = op_cols(a, op_a);
    CHFSI_REQUIRE(op_rows(b, op_b) == k, "gemm: inner dimensions disagree");
    CHFSI_REQUIRE(c.rows() == m && c.cols() == op_cols(b, op_b), "gemm: output shape mismatch");
    if (m == 0 || c.cols() == 0) return;
    init_blas_once();

    detail::for_each_tile(c.cols(), exec, [&](Index first, Index count) {
        const Complex* b_tile = op_b == Op::None ? b.data() + first * b.ld() : b.data() + first;
        cblas_zgemm(CblasColMajor, to_cblas(op_a), to_cblas(op_b), static_cast<int>(m),
                    static_cast<int>(count), static_cast<int>(k), &alpha, a.data(),
                    blas_ld(a.ld()), b_tile, blas_ld(b.ld()), &beta, c.data() + first * c.ld(),
                    blas_ld(c.ld()));
    });
}

Matrix multiply(ConstMatrixView a, Op op_a, ConstMatrixView b, Op op_b, const Exec& exec) {
    Matrix c(op_rows(a, op_a), op_cols(b, op_b));
    gemm(1.0, a, op_a, b, op_b, 0.0, c, exec);
    return c;
}

Matrix adjoint(ConstMatrixView a) {
    Matrix t(a.cols(), a.rows());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) t(j, i) = std::conj(a(i, j));
    return t;
}

double frobenius_norm(ConstMatrixView a) {
    double s = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (const Complex& z : a.col(j)) s += std::norm(z);
    return std::sqrt(s);
}

double one_norm(ConstMatrixView a) {
    double best = 0.0;
    for (Index j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (const Complex& z : a.col(j)) s += std::abs(z);
        best = std::max(best, s);
    }
    return best;
}

double column_norm(ConstMatrixView a, Index j) {
    double s = 0.0;
    for (const Complex& z : a.col(j)) s += std::norm(z);
    return std::sqrt(s);
}

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
    CHFSI_REQUIRE(x.size() == y.size(), "dot: length mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double orthonormality_error(ConstMatrixView q) {
    Matrix g = multiply(q, Op::ConjTrans, q, Op::None);
    for (Index i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
    return frobenius_norm(g);
}

Matrix random_block(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Matrix m(rows, cols);
    for (Complex& z : m.values()) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = {re, im};
    }
    return m;
}

CholeskyFactor cholesky_factor(const HermitianMatrix& b) {
    const Index n = b.order();
    Matrix l(b.matrix());
    for (Index j = 0; j < n; ++j) {
        const double pivot = l(j, j).real();
        if (!(pivot > 0.0) || !std::isfinite(pivot))
            throw NotPositiveDefinite(static_cast<std::size_t>(j + 1));
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        auto cj = l.col(j);
        for (Index i = j + 1; i < n; ++i) cj[i] /= d;
        // Right-looking rank-one update of the trailing lower triangle.
        for (Index k = j + 1; k < n; ++k) {
            const Complex ljk = std::conj(cj[k]);
            auto ck = l.col(k);
            for (Index i = k; i < n; ++i) ck[i] -= cj[i] * ljk;
        }
    }
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < j; ++i) l(i, j) = 0.0;
    return CholeskyFactor(std::move(l));
}

Matrix householder_qr(ConstMatrixView y, const Exec& exec) {
    const Index n = y.rows();
    const Index s = y.cols();
    CHFSI_REQUIRE(s >= 1 && s <= n, "householder_qr: need 1 <= columns <= rows");
    const double collapse = 1e-14 * frobenius_norm(y);

    Matrix r(y);
    Matrix v(n, s);  // reflector j lives in rows j..n-1 of column j

    auto reflect = [n](std::span<const Complex> vj, Index j, std::span<Complex> x) {
        Complex w = 0.0;
        for (Index i = j; i < n; ++i) w += std::conj(vj[i]) * x[i];
        w *= 2.0;
        for (Index i = j; i < n; ++i) x[i] -= vj[i] * w;
    };

    for (Index j = 0; j < s; ++j) {
        auto x = r.col(j);
        double norm2 = 0.0;
        for (Index i = j; i < n; ++i) norm2 += std::norm(x[i]);
        const double norm = std::sqrt(norm2);
        if (!(norm > collapse)) throw RankDeficient(static_cast<std::size_t>(j));

        const double ax = std::abs(x[j]);
        const Complex phase = ax == 0.0 ? Complex(1.0) : x[j] / ax;
        const Complex alpha = -phase * norm;
        auto vj = v.col(j);
        for (Index i = j; i < n; ++i) vj[i] = x[i];
        vj[j] -= alpha;
        double vnorm2 = 0.0;
        for (Index i = j; i < n; ++i) vnorm2 += std::norm(vj[i]);
        const double vnorm = std::sqrt(vnorm2);
        for (Index i = j; i < n; ++i) vj[i] /= vnorm;

        x[j] = alpha;
        for (Index i = j + 1; i < n; ++i) x[i] = 0.0;
        const Index rest = s - j - 1;
        detail::for_each_tile(rest, exec, [&](Index first, Index count) {
            for (Index k = j + 1 + first; k < j + 1 + first + count; ++k) reflect(vj, j, r.col(k));
        });
    }

    // Q = H_0 ... H_{s-1} [I; 0], accumulated backwards so column k of Q is
    // still e_k when reflectors with index > k are applied.
    Matrix q(n, s);
    for (Index j = 0; j < s; ++j) q(j, j) = 1.0;
    for (Index j = s - 1; j >= 0; --j) {
        auto vj = v.col(j);
        const Index width = s - j;
        detail::for_each_tile(width, exec, [&](Index first, Index count) {
            for (Index k = j + first; k < j + first + count; ++k) reflect(vj, j, q.col(k));
        });
    }
    return q;
}

namespace {

// Solves L z = x in place (forward substitution).
void forward_substitute(const Matrix& l, std::span<Complex> x) {
    const Index n = l.rows();
    for (Index k = 0; k < n; ++k) {
        if (x[k] == Complex(0.0)) continue;
        x[k] /= l(k, k).real();
        const Complex zk = x[k];
        auto lk = l.col(k);
        for (Index i = k + 1; i < n; ++i) x[i] -= lk[i] * zk;
    }
}

// Solves L^H z = x in place (backward substitution over columns of L).
void backward_substitute_adjoint(const Matrix& l, std::span<Complex> x) {
    const Index n = l.rows();
    for (Index k = n - 1; k >= 0; --k) {
        auto lk = l.col(k);
        Complex s = x[k];
        for (Index i = k + 1; i < n; ++i) s -= std::conj(lk[i]) * x[i];
        x[k] = s / l(k, k).real();
    }
}

Matrix solve_left(const Matrix& l, ConstMatrixView x, Op op, const Exec& exec) {
    Matrix z(x);
    detail::for_each_tile(z.cols(), exec, [&](Index first, Index count) {
        for (Index j = first; j < first + count; ++j) {
            if (op == Op::None)
                forward_substitute(l, z.col(j));
            else
                backward_substitute_adjoint(l, z.col(j));
        }
    });
    return z;
}

}  // namespace

Matrix triangular_solve(const CholeskyFactor& l, ConstMatrixView x, Side side, Op op,
                        const Exec& exec) {
    const Index n = l.order();
    if (side == Side::Left) {
        CHFSI_REQUIRE(x.rows() == n, "triangular_solve: row count must match the factor order");
        return solve_left(l.lower(), x, op, exec);
    }
    CHFSI_REQUIRE(x.cols() == n, "triangular_solve: column count must match the factor order");
    // Z op(L) = X  <=>  op(L)^H Z^H = X^H.
    const Op flipped = op == Op::None ? Op::ConjTrans : Op::None;
    return adjoint(solve_left(l.lower(), adjoint(x), flipped, exec));
}

EigenDecomposition oracle_eig(const HermitianMatrix& h) {
    constexpr int kMaxSweeps = 30;
    const Index n = h.order();
    Matrix a(h.matrix());
    Matrix v = Matrix::identity(n);
    const double scale = frobenius_norm(a);
    const double target = static_cast<double>(std::max<Index>(n, 1)) * 2.220446049250313e-16 * scale;

    auto off_norm = [&] {
        double s = 0.0;
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    auto rotate_columns = [n](std::span<Complex> cp, std::span<Complex> cq, double c, Complex s_lo,
                              Complex s_hi, Index p, Index q, bool skip_pq) {
        for (Index k = 0; k < n; ++k) {
            if (skip_pq && (k == p || k == q)) continue;
            const Complex xp = cp[k];
            const Complex xq = cq[k];
            cp[k] = c * xp - s_lo * xq;
            cq[k] = s_hi * xp + c * xq;
        }
    };

    bool converged = off_norm() <= target;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const Complex phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane.
                const Complex s_hi = s * phase;
                const Complex s_lo = s * std::conj(phase);

                rotate_columns(a.col(p), a.col(q), c, s_lo, s_hi, p, q, true);
                for (Index k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                rotate_columns(v.col(p), v.col(q), c, s_lo, s_hi, p, q, false);
            }
        }
        converged = off_norm() <= target;
    }
    if (!converged)
        throw OracleNoConvergence("jacobi oracle did not converge within 30 sweeps");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index x, Index y) { return a(x, x).real() < a(y, y).real(); });

    EigenDecomposition out;
    out.values.reserve(static_cast<std::size_t>(n));
    out.vectors = Matrix(n, n);
    for (Index j = 0; j < n; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        out.values.push_back(a(src, src).real());
        auto dst = out.vectors.col(j);
        auto from = v.col(src);
        std::copy(from.begin(), from.end(), dst.begin());
    }
    return out;
}

}  // namespace chfsi
