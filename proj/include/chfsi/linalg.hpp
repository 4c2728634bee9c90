#pragma once

#include <cstdint>
#include <vector>

#include "chfsi/matrix.hpp"

namespace chfsi {

enum class Op { None, ConjTrans };

/// Execution knobs for the data-parallel kernels.
///
/// Output columns are split into fixed contiguous tiles and each tile is
/// computed by exactly one worker, so a column's arithmetic never depends on
/// the worker count. `tile_cols == 0` picks one tile per worker.
struct Exec {
    int workers = 1;
    Index tile_cols = 0;
};

/// C <- alpha * op(A) * op(B) + beta * C.
void gemm(Complex alpha, ConstMatrixView a, Op op_a, ConstMatrixView b, Op op_b, Complex beta,
          MatrixView c, const Exec& exec = {});

inline void gemm(Complex alpha, ConstMatrixView a, ConstMatrixView b, Complex beta, MatrixView c,
                 const Exec& exec = {}) {
    gemm(alpha, a, Op::None, b, Op::None, beta, c, exec);
}

/// Returns op(A) * op(B).
Matrix multiply(ConstMatrixView a, Op op_a, ConstMatrixView b, Op op_b, const Exec& exec = {});
inline Matrix multiply(ConstMatrixView a, ConstMatrixView b, const Exec& exec = {}) {
    return multiply(a, Op::None, b, Op::None, exec);
}

Matrix adjoint(ConstMatrixView a);
double frobenius_norm(ConstMatrixView a);
/// Maximum absolute column sum.
double one_norm(ConstMatrixView a);
double column_norm(ConstMatrixView a, Index j);
Complex dot(std::span<const Complex> x, std::span<const Complex> y);  // x^H y

/// ||Q^H Q - I||_F.
double orthonormality_error(ConstMatrixView q);

/// Entries i.i.d. standard complex normal (real and imaginary parts N(0, 1/2)).
Matrix random_block(Index rows, Index cols, std::uint64_t seed);

/// B = L L^H. Throws NotPositiveDefinite naming the one-based failing pivot.
CholeskyFactor cholesky_factor(const HermitianMatrix& b);

/// Orthonormal basis of range(Y) via Householder reflections.
///
/// Throws RankDeficient when a column's remaining norm drops below
/// 1e-14 * ||Y||_F.
Matrix householder_qr(ConstMatrixView y, const Exec& exec = {});

enum class Side { Left, Right };

/// Left: op(L)^{-1} X. Right: X op(L)^{-1}.
Matrix triangular_solve(const CholeskyFactor& l, ConstMatrixView x, Side side, Op op,
                        const Exec& exec = {});

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
};

/// Full eigendecomposition by cyclic complex Jacobi rotations.
///
/// Shares no code with the iterative solver and serves as its test oracle.
/// Throws OracleNoConvergence after 30 sweeps.
EigenDecomposition oracle_eig(const HermitianMatrix& h);

}  // namespace chfsi
