#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chfsi/generalized.hpp"

namespace chfsi {

enum class ProblemKind { Standard, Generalized };

/// Synthetic sequence of correlated eigenproblems.
///
/// A(1) has a prescribed spectrum in a random unitary basis; every later
/// problem adds a random Hermitian perturbation of spectral scale
/// delta0 * rho^(l-1).
struct SequenceSpec {
    Index n = 500;
    int cycles = 13;
    Index nev = 35;
    double delta0 = 0.1;
    double rho = 0.5;
    std::uint64_t seed = 2013;
    ProblemKind kind = ProblemKind::Standard;
    /// Generalized only: perturb B with the same schedule (PSD increments).
    bool vary_b = false;

    void validate() const;
    /// Perturbation scale applied when stepping from cycle l to cycle l+1.
    double perturbation_scale(int cycle) const;
};

/// Named presets: "default" plus scaled-down shapes of the two reference systems
/// ("au98ag10-{500,1000,2000}", "na15cl14li-{500,1000,2000}").
SequenceSpec sequence_preset(std::string_view name);
std::vector<std::string> sequence_preset_names();

struct Problem {
    HermitianMatrix a;
    std::optional<HermitianMatrix> b;  // empty for standard problems
};

struct ProblemSequence {
    SequenceSpec spec;
    std::vector<Problem> problems;
};

/// Eigenvalues of A(1): smooth increasing profile with bounded jitter, so
/// neighbouring levels never coincide.
std::vector<double> initial_spectrum(Index n, std::uint64_t seed);

ProblemSequence generate_sequence(const SequenceSpec& spec);

/// theta_i = arccos(min(1, |<prev_i, curr_i>|)) in radians.
std::vector<double> vector_angles(ConstMatrixView prev, ConstMatrixView curr);

double median(std::vector<double> values);

enum class ReuseMode { Reuse, Random };

struct CycleResult {
    int cycle = 0;
    SolveReport report;
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
    std::vector<double> angles;  // against the previous cycle; empty for cycle 1
    double median_angle = 0.0;
};

struct SequenceReport {
    ReuseMode mode = ReuseMode::Reuse;
    std::vector<CycleResult> cycles;
};

/// Solves every problem in order.
///
/// Reuse mode warm-starts cycle l+1 from cycle l's search block and passes
/// the spectral estimates forward; random mode starts each cycle from fresh
/// random vectors with no prior estimates. Cycle 1 is identical in both modes.
SequenceReport solve_sequence(const ProblemSequence& seq, const SolverConfig& config,
                              ReuseMode mode);

struct CycleComparison {
    int cycle = 0;
    std::uint64_t reuse_matvecs = 0;
    std::uint64_t random_matvecs = 0;
    int reuse_iters = 0;
    int random_iters = 0;
    std::optional<double> work_ratio;  // random / reuse; undefined for cycle 1
    double median_angle = 0.0;
};

std::vector<CycleComparison> compare_modes(const SequenceReport& reuse,
                                           const SequenceReport& random);

/// One MatrixFile per matrix plus a "manifest.txt" listing them.
void write_sequence(const ProblemSequence& seq, const std::string& directory);
ProblemSequence read_sequence(const std::string& directory);

}  // namespace chfsi
