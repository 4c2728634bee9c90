#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chfsi/config.hpp"

namespace chfsi {

inline constexpr std::string_view kPhaseCsvHeader = "config_hash,phase,seconds,fraction";
inline constexpr std::string_view kScalingCsvHeader = "config_hash,workers,seconds,speedup,max_eig_dev";

struct PhaseBreakdown {
    std::string config_hash;
    int repeats = 0;
    // Median seconds per phase over the repeats.
    double filter = 0.0;
    double qr = 0.0;
    double rr = 0.0;
    double resid = 0.0;
    double other = 0.0;  // Lanczos, bootstrap, recheck and bookkeeping
    double total = 0.0;  // median wall time of a whole solve

    double sum() const { return filter + qr + rr + resid + other; }
    double fraction(double phase) const { return sum() > 0.0 ? phase / sum() : 0.0; }
};

/// Times chfsi_solve on the first problem of the configured sequence.
PhaseBreakdown bench_phases(const RunConfig& config);
void write_phase_csv(std::ostream& out, const PhaseBreakdown& b);

struct ScalingPoint {
    int workers = 1;
    double seconds = 0.0;  // median
    double speedup = 1.0;  // relative to the first entry of the worker list
    double max_eig_dev = 0.0;
    std::vector<double> eigenvalues;
};

struct ScalingResult {
    std::string config_hash;
    std::vector<ScalingPoint> points;
};

ScalingResult bench_scaling(const RunConfig& config, const std::vector<int>& workers);
void write_scaling_csv(std::ostream& out, const ScalingResult& result);

}  // namespace chfsi
