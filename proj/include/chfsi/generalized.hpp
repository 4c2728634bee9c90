#pragma once

#include <optional>

#include "chfsi/solver.hpp"

namespace chfsi {

/// H = L^{-1} A L^{-H}, re-symmetrized. Shares its spectrum with the pencil (A, B = L L^H).
HermitianMatrix reduce_to_standard(const HermitianMatrix& a, const CholeskyFactor& l,
                                   const Exec& exec = {});

/// C = L^{-H} Y: maps standard-form eigenvectors back to B-orthonormal ones.
Matrix back_transform(ConstMatrixView y, const CholeskyFactor& l, const Exec& exec = {});

struct GeneralizedResult {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;  // B-orthonormal
    Matrix search_block;  // generalized coordinates, for warm starts
    SpectralEstimates estimates;
    SolveReport report;
};

/// Solves A c = lambda B c for the nev lowest pairs.
///
/// `start`, when given, holds generalized-problem vectors; they are mapped
/// into standard form by L^H before the iteration.
GeneralizedResult solve_generalized(const HermitianMatrix& a, const HermitianMatrix& b,
                                    const std::optional<Matrix>& start, const SolverConfig& config,
                                    const std::optional<SpectralEstimates>& prior = std::nullopt);

}  // namespace chfsi
