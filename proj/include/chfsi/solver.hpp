#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chfsi/linalg.hpp"

namespace chfsi {

/// Applies a Hermitian matrix to column blocks and counts every column applied.
///
/// The count is the work proxy used throughout: one unit is one n x n
/// matrix-vector product.
class HermitianOperator {
public:
    explicit HermitianOperator(const HermitianMatrix& h, Exec exec = {}) : h_(&h), exec_(exec) {}

    Index order() const noexcept { return h_->order(); }
    const HermitianMatrix& matrix() const noexcept { return *h_; }
    const Exec& exec() const noexcept { return exec_; }

    /// out <- alpha * H * x + beta * out
    void apply(ConstMatrixView x, MatrixView out, Complex alpha = 1.0, Complex beta = 0.0) const;
    Matrix apply(ConstMatrixView x) const;

    std::uint64_t applied_columns() const noexcept { return applied_; }

private:
    const HermitianMatrix* h_;
    Exec exec_;
    mutable std::uint64_t applied_ = 0;
};

/// Chebyshev filter parameters: damp [lower, upper], normalize to 1 at reference.
struct FilterSpec {
    int degree = 20;
    double lower = 0.0;
    double upper = 1.0;
    double reference = -1.0;

    /// Throws ContractViolation for degree < 1 or lower >= upper, and
    /// FilterDegenerate when reference is not below lower by more than rounding.
    void validate() const;
};

/// Returns p_m(H) Y with p_m(t) = C_m((t - c)/e) / C_m((reference - c)/e).
///
/// Evaluated with the scaled three-term recurrence so iterates stay O(1);
/// performs exactly `degree` block applications of H.
Matrix chebyshev_filter(const HermitianOperator& h, ConstMatrixView y, const FilterSpec& spec);
Matrix chebyshev_filter(const HermitianMatrix& h, ConstMatrixView y, const FilterSpec& spec);

/// Upper bound for lambda_max(H): lambda_max(T_k) + ||f_k|| from k Lanczos steps.
double lanczos_upper_bound(const HermitianOperator& h, int steps, std::uint64_t seed);
double lanczos_upper_bound(const HermitianMatrix& h, int steps, std::uint64_t seed);

struct RitzPairs {
    std::vector<double> values;  // ascending
    Matrix vectors;              // Q * W
    Matrix h_vectors;            // H * Q * W, reused for residuals
};

RitzPairs rayleigh_ritz(const HermitianOperator& h, ConstMatrixView q);
RitzPairs rayleigh_ritz(const HermitianMatrix& h, ConstMatrixView q);

/// ||H y_i - lambda_i y_i||_2 for every column.
std::vector<double> residuals(const HermitianOperator& h, ConstMatrixView y,
                              std::span<const double> lambdas);
std::vector<double> residuals(const HermitianMatrix& h, ConstMatrixView y,
                              std::span<const double> lambdas);
/// Same, with H*Y already available.
std::vector<double> residuals_from_product(ConstMatrixView y, ConstMatrixView hy,
                                           std::span<const double> lambdas);

struct SolverConfig {
    Index nev = 1;
    double tol = 1e-10;
    int max_outer_iters = 30;
    int degree = 20;
    int lanczos_steps = 10;
    /// Extra search columns; negative selects ceil(0.1 * nev).
    Index buffer = -1;
    std::uint64_t seed = 42;
    int workers = 1;

    Index buffer_columns() const;
    Index block_columns() const { return nev + buffer_columns(); }
    void validate(Index n) const;
};

/// Estimates carried between problems: lowest eigenvalue and lambda_{nev+1}.
struct SpectralEstimates {
    double lowest = 0.0;
    double next_unwanted = 0.0;
};

struct IterationStats {
    int iter = 0;
    Index filtered_cols = 0;
    Index converged = 0;
    double max_resid = 0.0;  // over the unconverged part of the block
    double min_resid = 0.0;
    std::uint64_t matvecs = 0;
    double t_filter = 0.0;
    double t_qr = 0.0;
    double t_rr = 0.0;
    double t_resid = 0.0;
};

struct SolveReport {
    std::vector<IterationStats> iterations;
    std::uint64_t lanczos_matvecs = 0;
    std::uint64_t bootstrap_matvecs = 0;
    std::uint64_t recheck_matvecs = 0;
    std::uint64_t total_matvecs = 0;
    double upper_bound = 0.0;
    Index rank_repairs = 0;
    double t_lanczos = 0.0;
    double t_bootstrap = 0.0;
    double t_total = 0.0;

    int outer_iterations() const { return static_cast<int>(iterations.size()); }
    /// Sum of the per-iteration filter/QR/RR/residual timings.
    double phase_time() const;
};

struct SolveResult {
    std::vector<double> eigenvalues;  // nev values, ascending
    Matrix eigenvectors;              // n x nev, orthonormal
    std::vector<double> final_residuals;
    /// Full search block (locked pairs first) for warm-starting a related problem.
    Matrix search_block;
    SpectralEstimates estimates;
    SolveReport report;
};

class NotConverged : public Error {
public:
    explicit NotConverged(SolveResult partial);
    const SolveResult& partial() const noexcept { return partial_; }

private:
    SolveResult partial_;
};

/// Chebyshev filtered subspace iteration with deflation and locking.
///
/// `start` may hold between nev and nev + buffer columns; missing columns are
/// filled with seeded random vectors. Without `prior`, one unfiltered
/// Rayleigh-Ritz pass over the start block seeds the filter interval.
SolveResult chfsi_solve(const HermitianMatrix& h, const std::optional<Matrix>& start,
                        const SolverConfig& config,
                        const std::optional<SpectralEstimates>& prior = std::nullopt);

}  // namespace chfsi
