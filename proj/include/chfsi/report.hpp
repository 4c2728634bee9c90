#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "chfsi/sequence.hpp"

namespace chfsi {

inline constexpr std::string_view kIterationCsvHeader =
    "iter,filtered_cols,converged,max_resid,matmul_count,t_filter,t_qr,t_rr,t_resid";
inline constexpr std::string_view kSequenceCsvHeader =
    "cycle,reuse_matvecs,random_matvecs,work_ratio,median_angle,reuse_iters,random_iters";

/// One row per outer iteration. matmul_count is the cumulative number of
/// H-column products in the solve, Lanczos and bootstrap included.
void write_iteration_csv(std::ostream& out, const SolveReport& report);
void write_iteration_csv(const std::string& path, const SolveReport& report);

/// Missing quantities (one mode not run, ratio for cycle 1) are empty fields.
void write_sequence_csv(std::ostream& out, const std::vector<CycleComparison>& rows);
void write_sequence_csv(const std::string& path, const std::vector<CycleComparison>& rows);

/// Builds comparison rows from whichever modes were run.
std::vector<CycleComparison> comparison_rows(const SequenceReport* reuse, const SequenceReport* random);

std::string format_csv_double(double v);

}  // namespace chfsi
