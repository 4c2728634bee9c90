#include "chfsi/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "chfsi/io.hpp"

namespace chfsi {

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_iteration_csv(std::ostream& out, const SolveReport& report) {
    out << kIterationCsvHeader << "\n";
    std::uint64_t total = report.lanczos_matvecs + report.bootstrap_matvecs;
    for (const auto& it : report.iterations) {
        total += it.matvecs;
        out << it.iter << ',' << it.filtered_cols << ',' << it.converged << ','
            << format_csv_double(it.max_resid) << ',' << total << ','
            << format_csv_double(it.t_filter) << ',' << format_csv_double(it.t_qr) << ','
            << format_csv_double(it.t_rr) << ',' << format_csv_double(it.t_resid) << "\n";
    }
}

void write_iteration_csv(const std::string& path, const SolveReport& report) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    write_iteration_csv(f, report);
}

std::vector<CycleComparison> comparison_rows(const SequenceReport* reuse, const SequenceReport* random) {
    if (reuse && random) return compare_modes(*reuse, *random);
    std::vector<CycleComparison> rows;
    const SequenceReport* only = reuse ? reuse : random;
    if (!only) return rows;
    for (const auto& c : only->cycles) {
        CycleComparison row;
        row.cycle = c.cycle;
        row.median_angle = c.median_angle;
        if (reuse) {
            row.reuse_matvecs = c.report.total_matvecs;
            row.reuse_iters = c.report.outer_iterations();
        } else {
            row.random_matvecs = c.report.total_matvecs;
            row.random_iters = c.report.outer_iterations();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sequence_csv(std::ostream& out, const std::vector<CycleComparison>& rows) {
    out << kSequenceCsvHeader << "\n";
    for (const auto& r : rows) {
        const bool has_reuse = r.reuse_matvecs > 0;
        const bool has_random = r.random_matvecs > 0;
        out << r.cycle << ',';
        if (has_reuse) out << r.reuse_matvecs;
        out << ',';
        if (has_random) out << r.random_matvecs;
        out << ',';
        if (r.work_ratio) out << format_csv_double(*r.work_ratio);
        out << ',';
        if (r.cycle > 1) out << format_csv_double(r.median_angle);
        out << ',';
        if (has_reuse) out << r.reuse_iters;
        out << ',';
        if (has_random) out << r.random_iters;
        out << "\n";
    }
}

void write_sequence_csv(const std::string& path, const std::vector<CycleComparison>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    write_sequence_csv(f, rows);
}

}  // namespace chfsi
