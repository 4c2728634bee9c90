#include "chfsi/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace chfsi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void axpy(Complex alpha, ConstMatrixView x, MatrixView y) {
    for (Index j = 0; j < x.cols(); ++j) {
        auto xs = x.col(j);
        auto ys = y.col(j);
        for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += alpha * xs[i];
    }
}

}  // namespace

void HermitianOperator::apply(ConstMatrixView x, MatrixView out, Complex alpha,
                              Complex beta) const {
    CHFSI_REQUIRE(x.rows() == order(), "operator: block row count must match the matrix order");
    gemm(alpha, h_->view(), x, beta, out, exec_);
    applied_ += static_cast<std::uint64_t>(x.cols());
}

Matrix HermitianOperator::apply(ConstMatrixView x) const {
    Matrix out(order(), x.cols());
    apply(x, out);
    return out;
}

void FilterSpec::validate() const {
    CHFSI_REQUIRE(degree >= 1, "filter degree must be at least 1");
    CHFSI_REQUIRE(std::isfinite(lower) && std::isfinite(upper) && std::isfinite(reference),
                  "filter interval must be finite");
    CHFSI_REQUIRE(lower < upper, "filter interval requires lower < upper");
    // Numerically equal edges count as overlapping.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(lower), std::abs(upper)});
    if (lower - reference <= slack)
        throw FilterDegenerate("filter reference " + std::to_string(reference) +
                               " is not below the damped interval [" + std::to_string(lower) +
                               ", " + std::to_string(upper) + "]");
}

Matrix chebyshev_filter(const HermitianOperator& h, ConstMatrixView y, const FilterSpec& spec) {
    spec.validate();
    CHFSI_REQUIRE(y.rows() == h.order(), "filter: block row count must match the matrix order");
    const double center = 0.5 * (spec.upper + spec.lower);
    const double half_width = 0.5 * (spec.upper - spec.lower);
    // sigma_j = C_{j-1}(tau) / C_j(tau), tau = (reference - center) / half_width.
    const double sigma1 = half_width / (spec.reference - center);
    double sigma = sigma1;

    Matrix prev(y);
    Matrix cur(y.rows(), y.cols());
    h.apply(y, cur, sigma1 / half_width, 0.0);
    axpy(-sigma1 * center / half_width, y, cur);

    for (int j = 2; j <= spec.degree; ++j) {
        const double sigma_next = 1.0 / (2.0 / sigma1 - sigma);
        const double scale = 2.0 * sigma_next / half_width;
        // prev <- scale * (H - center) cur - sigma * sigma_next * prev
        h.apply(cur, prev, scale, -sigma * sigma_next);
        axpy(-scale * center, cur, prev);
        std::swap(prev, cur);
        sigma = sigma_next;
    }
    return cur;
}

Matrix chebyshev_filter(const HermitianMatrix& h, ConstMatrixView y, const FilterSpec& spec) {
    return chebyshev_filter(HermitianOperator(h), y, spec);
}

double lanczos_upper_bound(const HermitianOperator& h, int steps, std::uint64_t seed) {
    const Index n = h.order();
    CHFSI_REQUIRE(steps >= 2, "lanczos needs at least 2 steps");
    CHFSI_REQUIRE(steps <= n, "lanczos steps cannot exceed the matrix order");

    Matrix v = random_block(n, 1, seed);
    {
        const double nv = column_norm(v, 0);
        for (Complex& z : v.values()) z /= nv;
    }
    Matrix v_prev(n, 1);
    Matrix w(n, 1);
    std::vector<double> alphas;
    std::vector<double> betas;
    double residual = 0.0;

    for (int j = 0; j < steps; ++j) {
        h.apply(v, w);
        auto ws = w.col(0);
        auto vs = v.col(0);
        if (j > 0) {
            const double b = betas.back();
            auto ps = v_prev.col(0);
            for (Index i = 0; i < n; ++i) ws[i] -= b * ps[i];
        }
        const double a = dot(vs, ws).real();
        for (Index i = 0; i < n; ++i) ws[i] -= a * vs[i];
        alphas.push_back(a);
        residual = column_norm(w, 0);

        const double scale = std::max(1.0, std::abs(a) + (betas.empty() ? 0.0 : betas.back()));
        if (residual < 1e-14 * scale || j + 1 == steps) break;  // invariant subspace or done
        betas.push_back(residual);
        std::swap(v_prev, v);
        for (Index i = 0; i < n; ++i) v(i, 0) = ws[i] / residual;
    }

    const Index k = static_cast<Index>(alphas.size());
    Matrix t(k, k);
    for (Index i = 0; i < k; ++i) {
        t(i, i) = alphas[static_cast<std::size_t>(i)];
        if (i + 1 < k) {
            t(i + 1, i) = betas[static_cast<std::size_t>(i)];
            t(i, i + 1) = betas[static_cast<std::size_t>(i)];
        }
    }
    const auto ritz = oracle_eig(HermitianMatrix::symmetrize(std::move(t)));
    return ritz.values.back() + residual;
}

double lanczos_upper_bound(const HermitianMatrix& h, int steps, std::uint64_t seed) {
    return lanczos_upper_bound(HermitianOperator(h), steps, seed);
}

RitzPairs rayleigh_ritz(const HermitianOperator& h, ConstMatrixView q) {
    CHFSI_REQUIRE(q.rows() == h.order(), "rayleigh_ritz: block row count must match the matrix order");
    Matrix hq = h.apply(q);
    Matrix g = multiply(q, Op::ConjTrans, hq, Op::None, h.exec());
    const auto small = oracle_eig(HermitianMatrix::symmetrize(std::move(g)));
    RitzPairs out;
    out.values = small.values;
    out.vectors = multiply(q, small.vectors, h.exec());
    out.h_vectors = multiply(hq, small.vectors, h.exec());
    return out;
}

RitzPairs rayleigh_ritz(const HermitianMatrix& h, ConstMatrixView q) {
    return rayleigh_ritz(HermitianOperator(h), q);
}

std::vector<double> residuals_from_product(ConstMatrixView y, ConstMatrixView hy,
                                           std::span<const double> lambdas) {
    CHFSI_REQUIRE(static_cast<Index>(lambdas.size()) == y.cols(),
                  "residuals: one eigenvalue per column required");
    CHFSI_REQUIRE(hy.rows() == y.rows() && hy.cols() == y.cols(),
                  "residuals: product shape mismatch");
    std::vector<double> out(lambdas.size());
    for (Index j = 0; j < y.cols(); ++j) {
        auto ys = y.col(j);
        auto hs = hy.col(j);
        const double lam = lambdas[static_cast<std::size_t>(j)];
        double s = 0.0;
        for (std::size_t i = 0; i < ys.size(); ++i) s += std::norm(hs[i] - lam * ys[i]);
        out[static_cast<std::size_t>(j)] = std::sqrt(s);
    }
    return out;
}

std::vector<double> residuals(const HermitianOperator& h, ConstMatrixView y,
                              std::span<const double> lambdas) {
    CHFSI_REQUIRE(static_cast<Index>(lambdas.size()) == y.cols(),
                  "residuals: one eigenvalue per column required");
    const Matrix hy = h.apply(y);
    return residuals_from_product(y, hy, lambdas);
}

std::vector<double> residuals(const HermitianMatrix& h, ConstMatrixView y,
                              std::span<const double> lambdas) {
    return residuals(HermitianOperator(h), y, lambdas);
}

double SolveReport::phase_time() const {
    double s = 0.0;
    for (const auto& it : iterations) s += it.t_filter + it.t_qr + it.t_rr + it.t_resid;
    return s;
}

Index SolverConfig::buffer_columns() const {
    if (buffer >= 0) return buffer;
    return static_cast<Index>(std::ceil(0.1 * static_cast<double>(nev)));
}

void SolverConfig::validate(Index n) const {
    CHFSI_REQUIRE(nev >= 1, "nev must be at least 1");
    CHFSI_REQUIRE(tol > 0.0, "tol must be positive");
    CHFSI_REQUIRE(max_outer_iters >= 1, "max_outer_iters must be at least 1");
    CHFSI_REQUIRE(degree >= 1, "degree must be at least 1");
    CHFSI_REQUIRE(lanczos_steps >= 2, "lanczos_steps must be at least 2");
    CHFSI_REQUIRE(workers >= 1, "workers must be at least 1");
    CHFSI_REQUIRE(buffer_columns() >= 1, "at least one buffer column is needed to estimate lambda_{nev+1}");
    CHFSI_REQUIRE(block_columns() <= n, "nev + buffer exceeds the matrix order");
}

NotConverged::NotConverged(SolveResult partial)
    : Error("not converged: " + std::to_string(partial.eigenvalues.size()) +
            " pairs locked after " + std::to_string(partial.report.outer_iterations()) +
            " outer iterations"),
      partial_(std::move(partial)) {}

namespace {

/// Orthonormalizes `x` against the orthonormal columns of `locked`, then internally.
///
/// Collapsed columns are replaced with fresh random vectors and the whole
/// block is retried.
Matrix orthonormalize(ConstMatrixView locked, Matrix x, std::mt19937_64& rng, const Exec& exec,
                      Index& repairs) {
    auto project_out = [&](Matrix& block) {
        if (locked.cols() == 0) return;
        for (int pass = 0; pass < 2; ++pass) {
            const Matrix coeff = multiply(locked, Op::ConjTrans, block, Op::None, exec);
            gemm(-1.0, locked, coeff, 1.0, block, exec);
        }
    };

    const Index max_attempts = x.cols() + 8;
    for (Index attempt = 0;; ++attempt) {
        Matrix work(x);
        project_out(work);
        try {
            Matrix q = householder_qr(work, exec);
            if (locked.cols() > 0) {
                project_out(q);
                q = householder_qr(q, exec);
            }
            return q;
        } catch (const RankDeficient& e) {
            if (attempt >= max_attempts) throw;
            const Index col = static_cast<Index>(e.column());
            const Matrix fresh = random_block(x.rows(), 1, rng());
            auto dst = x.col(col);
            std::copy(fresh.values().begin(), fresh.values().end(), dst.begin());
            // Keep the replacement on the same scale as the rest of the block.
            const double target = frobenius_norm(x) / std::sqrt(static_cast<double>(x.cols()));
            const double have = column_norm(x, col);
            for (Complex& z : dst) z *= target / have;
            ++repairs;
        }
    }
}

/// Lowest value and the (nev+1)-th smallest of the merged Ritz set.
SpectralEstimates estimates_from(std::vector<double> values, Index nev) {
    std::sort(values.begin(), values.end());
    return {values.front(), values[static_cast<std::size_t>(nev)]};
}

void copy_column(ConstMatrixView src, Index from, MatrixView dst, Index to) {
    auto s = src.col(from);
    auto d = dst.col(to);
    std::copy(s.begin(), s.end(), d.begin());
}

}  // namespace

SolveResult chfsi_solve(const HermitianMatrix& h, const std::optional<Matrix>& start,
                        const SolverConfig& config, const std::optional<SpectralEstimates>& prior) {
    const Index n = h.order();
    config.validate(n);
    const auto t_start = Clock::now();
    const Index nev = config.nev;
    const Index s = config.block_columns();
    const Exec exec{config.workers, 0};
    HermitianOperator op(h, exec);
    std::mt19937_64 rng(config.seed);

    SolveResult result;
    SolveReport& report = result.report;

    Matrix block = random_block(n, s, rng());
    if (start) {
        CHFSI_REQUIRE(start->rows() == n, "start block row count must match the matrix order");
        CHFSI_REQUIRE(start->cols() >= nev && start->cols() <= s,
                      "start block must have between nev and nev + buffer columns");
        for (Index j = 0; j < start->cols(); ++j) copy_column(*start, j, block, j);
    }

    {
        const auto t0 = Clock::now();
        report.upper_bound =
            lanczos_upper_bound(op, static_cast<int>(std::min<Index>(config.lanczos_steps, n)), rng());
        report.lanczos_matvecs = op.applied_columns();
        report.t_lanczos = seconds_since(t0);
    }

    Matrix locked(n, nev);
    std::vector<double> locked_values;
    Index n_locked = 0;

    Matrix active = orthonormalize(locked.columns(0, 0), std::move(block), rng, exec,
                                   report.rank_repairs);
    SpectralEstimates est;
    if (prior) {
        est = *prior;
    } else {
        const auto t0 = Clock::now();
        const auto before = op.applied_columns();
        RitzPairs rr = rayleigh_ritz(op, active);
        active = std::move(rr.vectors);
        est = estimates_from(rr.values, nev);
        report.bootstrap_matvecs = op.applied_columns() - before;
        report.t_bootstrap = seconds_since(t0);
    }

    auto finish_partial = [&]() {
        result.eigenvalues.clear();
        std::vector<Index> order(static_cast<std::size_t>(n_locked));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return locked_values[static_cast<std::size_t>(a)] <
                   locked_values[static_cast<std::size_t>(b)];
        });
        result.eigenvectors = Matrix(n, n_locked);
        result.search_block = Matrix(n, n_locked + active.cols());
        for (Index j = 0; j < n_locked; ++j) {
            const Index src = order[static_cast<std::size_t>(j)];
            result.eigenvalues.push_back(locked_values[static_cast<std::size_t>(src)]);
            copy_column(locked, src, result.eigenvectors, j);
            copy_column(locked, src, result.search_block, j);
        }
        for (Index j = 0; j < active.cols(); ++j)
            copy_column(active, j, result.search_block, n_locked + j);
        result.estimates = est;
    };

    for (int iter = 1; iter <= config.max_outer_iters && n_locked < nev; ++iter) {
        IterationStats stats;
        stats.iter = iter;
        stats.filtered_cols = active.cols();
        const auto work_before = op.applied_columns();

        auto t0 = Clock::now();
        FilterSpec spec{config.degree, est.next_unwanted, report.upper_bound, est.lowest};
        // The block reached the top of the spectrum (e.g. nev + buffer = n). Raising b keeps it a bound.
        if (spec.lower >= spec.upper)
            spec.upper = spec.lower + 0.01 * std::max(spec.lower - spec.reference, 0.0);
        Matrix filtered;
        // A numerically scalar spectrum leaves nothing to separate; any basis is an eigenbasis.
        const bool scalar_spectrum =
            report.upper_bound - est.lowest <= 1e-12 * std::max(1.0, std::abs(report.upper_bound));
        if (scalar_spectrum) {
            filtered = active;
        } else {
            try {
                filtered = chebyshev_filter(op, active, spec);
            } catch (const FilterDegenerate& e) {
                throw FilterDegenerate(std::string(e.what()) +
                                       "; eigenvalues nev and nev+1 coincide, increase the buffer");
            }
        }
        stats.t_filter = seconds_since(t0);

        t0 = Clock::now();
        Matrix q = orthonormalize(locked.columns(0, n_locked), std::move(filtered), rng, exec,
                                  report.rank_repairs);
        stats.t_qr = seconds_since(t0);

        t0 = Clock::now();
        RitzPairs rr = rayleigh_ritz(op, q);
        stats.t_rr = seconds_since(t0);

        t0 = Clock::now();
        const auto res = residuals_from_product(rr.vectors, rr.h_vectors, rr.values);
        std::vector<double> merged = locked_values;
        merged.insert(merged.end(), rr.values.begin(), rr.values.end());

        const Index candidates = std::min(nev - n_locked, rr.vectors.cols());
        std::vector<bool> lock(static_cast<std::size_t>(rr.vectors.cols()), false);
        for (Index i = 0; i < candidates; ++i)
            if (res[static_cast<std::size_t>(i)] < config.tol) lock[static_cast<std::size_t>(i)] = true;

        Matrix next_active(n, rr.vectors.cols() - std::count(lock.begin(), lock.end(), true));
        Index kept = 0;
        stats.max_resid = 0.0;
        stats.min_resid = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < rr.vectors.cols(); ++i) {
            if (lock[static_cast<std::size_t>(i)]) {
                copy_column(rr.vectors, i, locked, n_locked);
                locked_values.push_back(rr.values[static_cast<std::size_t>(i)]);
                ++n_locked;
            } else {
                copy_column(rr.vectors, i, next_active, kept++);
                if (i < candidates) {
                    stats.max_resid = std::max(stats.max_resid, res[static_cast<std::size_t>(i)]);
                    stats.min_resid = std::min(stats.min_resid, res[static_cast<std::size_t>(i)]);
                }
            }
        }
        if (!std::isfinite(stats.min_resid)) stats.min_resid = 0.0;
        active = std::move(next_active);
        est = estimates_from(std::move(merged), nev);
        stats.t_resid = seconds_since(t0);

        stats.converged = n_locked;
        stats.matvecs = op.applied_columns() - work_before;
        report.iterations.push_back(stats);
    }

    finish_partial();
    if (n_locked < nev) {
        report.total_matvecs = op.applied_columns();
        report.t_total = seconds_since(t_start);
        throw NotConverged(std::move(result));
    }

    const auto before = op.applied_columns();
    result.final_residuals = residuals(op, result.eigenvectors, result.eigenvalues);
    report.recheck_matvecs = op.applied_columns() - before;
    report.total_matvecs = op.applied_columns();
    report.t_total = seconds_since(t_start);
    for (double r : result.final_residuals)
        if (!(r < config.tol)) throw NotConverged(std::move(result));
    return result;
}

}  // namespace chfsi
