#include "chfsi/bench.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "chfsi/report.hpp"

namespace chfsi {

namespace {

Problem first_problem(const RunConfig& config) {
    SequenceSpec spec = config.sequence;
    spec.cycles = 1;
    ProblemSequence seq = generate_sequence(spec);
    return std::move(seq.problems.front());
}

SolveResult timed_solve(const Problem& p, const SolverConfig& solver) {
    if (p.b) {
        GeneralizedResult g = solve_generalized(p.a, *p.b, std::nullopt, solver);
        SolveResult r;
        r.eigenvalues = std::move(g.eigenvalues);
        r.report = std::move(g.report);
        return r;
    }
    return chfsi_solve(p.a, std::nullopt, solver);
}

}  // namespace

PhaseBreakdown bench_phases(const RunConfig& config) {
    const Problem p = first_problem(config);
    std::vector<double> filter, qr, rr, resid, other, total;
    for (int r = 0; r < config.repeats; ++r) {
        const SolveReport rep = timed_solve(p, config.solver).report;
        double f = 0, q = 0, g = 0, s = 0;
        for (const auto& it : rep.iterations) {
            f += it.t_filter;
            q += it.t_qr;
            g += it.t_rr;
            s += it.t_resid;
        }
        filter.push_back(f);
        qr.push_back(q);
        rr.push_back(g);
        resid.push_back(s);
        other.push_back(std::max(0.0, rep.t_total - (f + q + g + s)));
        total.push_back(rep.t_total);
    }
    PhaseBreakdown b;
    b.config_hash = config_hash(config);
    b.repeats = config.repeats;
    b.filter = median(filter);
    b.qr = median(qr);
    b.rr = median(rr);
    b.resid = median(resid);
    b.other = median(other);
    b.total = median(total);
    return b;
}

void write_phase_csv(std::ostream& out, const PhaseBreakdown& b) {
    out << kPhaseCsvHeader << "\n";
    const std::pair<const char*, double> rows[] = {
        {"filter", b.filter}, {"qr", b.qr}, {"rr", b.rr}, {"resid", b.resid}, {"other", b.other}};
    for (const auto& [name, secs] : rows)
        out << b.config_hash << ',' << name << ',' << format_csv_double(secs) << ','
            << format_csv_double(b.fraction(secs)) << "\n";
}

ScalingResult bench_scaling(const RunConfig& config, const std::vector<int>& workers) {
    CHFSI_REQUIRE(!workers.empty(), "bench_scaling needs at least one worker count");
    const Problem p = first_problem(config);
    ScalingResult out;
    out.config_hash = config_hash(config);
    for (int w : workers) {
        CHFSI_REQUIRE(w >= 1, "worker counts must be positive");
        SolverConfig solver = config.solver;
        solver.workers = w;
        ScalingPoint pt;
        pt.workers = w;
        std::vector<double> times;
        for (int r = 0; r < config.repeats; ++r) {
            SolveResult res = timed_solve(p, solver);
            times.push_back(res.report.t_total);
            pt.eigenvalues = std::move(res.eigenvalues);
        }
        pt.seconds = median(times);
        out.points.push_back(std::move(pt));
    }
    const ScalingPoint& base = out.points.front();
    for (auto& pt : out.points) {
        pt.speedup = pt.seconds > 0.0 ? base.seconds / pt.seconds : 0.0;
        double dev = 0.0;
        for (std::size_t i = 0; i < pt.eigenvalues.size(); ++i)
            dev = std::max(dev, std::abs(pt.eigenvalues[i] - base.eigenvalues[i]));
        pt.max_eig_dev = dev;
    }
    return out;
}

void write_scaling_csv(std::ostream& out, const ScalingResult& result) {
    out << kScalingCsvHeader << "\n";
    for (const auto& pt : result.points)
        out << result.config_hash << ',' << pt.workers << ',' << format_csv_double(pt.seconds) << ','
            << format_csv_double(pt.speedup) << ',' << format_csv_double(pt.max_eig_dev) << "\n";
}

}  // namespace chfsi
