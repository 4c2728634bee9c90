#include "chfsi/generalized.hpp"

namespace chfsi {

HermitianMatrix reduce_to_standard(const HermitianMatrix& a, const CholeskyFactor& l,
                                   const Exec& exec) {
    CHFSI_REQUIRE(a.order() == l.order(), "reduce_to_standard: orders differ");
    Matrix left = triangular_solve(l, a.view(), Side::Left, Op::None, exec);
    Matrix h = triangular_solve(l, left, Side::Right, Op::ConjTrans, exec);
    return HermitianMatrix::symmetrize(std::move(h));
}

Matrix back_transform(ConstMatrixView y, const CholeskyFactor& l, const Exec& exec) {
    return triangular_solve(l, y, Side::Left, Op::ConjTrans, exec);
}

GeneralizedResult solve_generalized(const HermitianMatrix& a, const HermitianMatrix& b,
                                    const std::optional<Matrix>& start, const SolverConfig& config,
                                    const std::optional<SpectralEstimates>& prior) {
    CHFSI_REQUIRE(a.order() == b.order(), "solve_generalized: A and B orders differ");
    const Exec exec{config.workers, 0};
    const CholeskyFactor l = cholesky_factor(b);
    const HermitianMatrix h = reduce_to_standard(a, l, exec);

    std::optional<Matrix> standard_start;
    if (start) {
        CHFSI_REQUIRE(start->rows() == a.order(), "start block row count must match the matrix order");
        standard_start = multiply(l.lower(), Op::ConjTrans, *start, Op::None, exec);
    }

    auto to_generalized = [&](SolveResult r) {
        GeneralizedResult g;
        g.eigenvalues = std::move(r.eigenvalues);
        g.eigenvectors = back_transform(r.eigenvectors, l, exec);
        g.search_block = back_transform(r.search_block, l, exec);
        g.estimates = r.estimates;
        g.report = std::move(r.report);
        return g;
    };

    return to_generalized(chfsi_solve(h, standard_start, config, prior));
}

}  // namespace chfsi
