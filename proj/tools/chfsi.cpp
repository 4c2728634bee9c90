// chfsi command-line entry point.
//
// Exit codes: 0 success, 1 input or usage error, 2 solver did not converge.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chfsi/bench.hpp"
#include "chfsi/config.hpp"
#include "chfsi/generalized.hpp"
#include "chfsi/io.hpp"
#include "chfsi/report.hpp"
#include "chfsi/sequence.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

struct SolveArgs {
    std::string matrix_a;
    std::string matrix_b;
    std::string start_vectors;
    std::string report_csv;
    std::string eigenvalues_out = "eigenvalues.txt";
    std::string eigenvectors_out = "eigenvectors.chm";
    long long nev = 1;
    double tol = 1e-10;
    int degree = 20;
    int workers = 0;
    int max_iters = 30;
    long long buffer = -1;
    int lanczos_steps = 10;
    unsigned long long seed = 42;
};

void write_eigenvalues(const std::string& path, const std::vector<double>& values) {
    std::ofstream f(path);
    if (!f) throw chfsi::IoError("cannot write " + path);
    for (double v : values) f << chfsi::format_value(v) << "\n";
}

void write_outputs(const SolveArgs& args, const std::vector<double>& values, chfsi::Matrix vectors,
                   const chfsi::SolveReport& report) {
    write_eigenvalues(args.eigenvalues_out, values);
    chfsi::normalize_phases(vectors);
    chfsi::write_matrix(args.eigenvectors_out, vectors, chfsi::MatrixKind::Block);
    if (!args.report_csv.empty()) chfsi::write_iteration_csv(args.report_csv, report);
}

int run_solve(const SolveArgs& args) {
    chfsi::SolverConfig cfg;
    cfg.nev = args.nev;
    cfg.tol = args.tol;
    cfg.degree = args.degree;
    cfg.workers = args.workers > 0 ? args.workers : chfsi::workers_from_env(1);
    cfg.max_outer_iters = args.max_iters;
    cfg.buffer = args.buffer;
    cfg.lanczos_steps = args.lanczos_steps;
    cfg.seed = args.seed;

    const chfsi::HermitianMatrix a = chfsi::read_hermitian(args.matrix_a);
    std::optional<chfsi::HermitianMatrix> b;
    if (!args.matrix_b.empty()) {
        b = chfsi::read_hermitian(args.matrix_b);
        CHFSI_REQUIRE(b->order() == a.order(), "matrix B order differs from matrix A");
    }
    cfg.validate(a.order());
    std::optional<chfsi::Matrix> start;
    if (!args.start_vectors.empty()) start = chfsi::read_block(args.start_vectors);

    try {
        if (b) {
            auto r = chfsi::solve_generalized(a, *b, start, cfg);
            write_outputs(args, r.eigenvalues, std::move(r.eigenvectors), r.report);
            std::printf("converged %zu pairs in %d outer iterations (%llu matvecs)\n", r.eigenvalues.size(),
                        r.report.outer_iterations(), static_cast<unsigned long long>(r.report.total_matvecs));
        } else {
            auto r = chfsi::chfsi_solve(a, start, cfg);
            write_outputs(args, r.eigenvalues, std::move(r.eigenvectors), r.report);
            std::printf("converged %zu pairs in %d outer iterations (%llu matvecs)\n", r.eigenvalues.size(),
                        r.report.outer_iterations(), static_cast<unsigned long long>(r.report.total_matvecs));
        }
    } catch (const chfsi::NotConverged& e) {
        const auto& p = e.partial();
        if (!args.report_csv.empty()) chfsi::write_iteration_csv(args.report_csv, p.report);
        std::fprintf(stderr, "chfsi: %s\n", e.what());
        return kExitNotConverged;
    }
    return kExitOk;
}

void print_summary(const std::vector<chfsi::CycleComparison>& rows, bool reuse, bool random) {
    std::printf("%5s %12s %12s %8s %14s\n", "cycle", "reuse_work", "random_work", "ratio", "median_angle");
    for (const auto& r : rows) {
        char ratio[32] = "";
        if (r.work_ratio) std::snprintf(ratio, sizeof ratio, "%.3f", *r.work_ratio);
        char angle[32] = "";
        if (r.cycle > 1) std::snprintf(angle, sizeof angle, "%.3e", r.median_angle);
        char ru[32] = "", rr[32] = "";
        if (reuse) std::snprintf(ru, sizeof ru, "%llu", static_cast<unsigned long long>(r.reuse_matvecs));
        if (random) std::snprintf(rr, sizeof rr, "%llu", static_cast<unsigned long long>(r.random_matvecs));
        std::printf("%5d %12s %12s %8s %14s\n", r.cycle, ru, rr, ratio, angle);
    }
}

chfsi::RunConfig load_config(const std::string& path) {
    if (path.empty()) return chfsi::parse_run_config("");
    return chfsi::load_run_config(path);
}

int run_sequence(const std::string& config_path, const std::string& mode_flag, const std::string& csv_flag,
                 int workers) {
    chfsi::RunConfig rc = load_config(config_path);
    if (!mode_flag.empty()) rc.mode = chfsi::parse_mode(mode_flag);
    if (!csv_flag.empty()) rc.output_csv = csv_flag;
    if (workers > 0) rc.solver.workers = workers;
    else if (rc.solver.workers == 1) rc.solver.workers = chfsi::workers_from_env(1);

    const chfsi::ProblemSequence seq = chfsi::generate_sequence(rc.sequence);
    std::optional<chfsi::SequenceReport> reuse, random;
    try {
        if (rc.mode != chfsi::RunMode::Random)
            reuse = chfsi::solve_sequence(seq, rc.solver, chfsi::ReuseMode::Reuse);
        if (rc.mode != chfsi::RunMode::Reuse)
            random = chfsi::solve_sequence(seq, rc.solver, chfsi::ReuseMode::Random);
    } catch (const chfsi::NotConverged& e) {
        std::fprintf(stderr, "chfsi: %s\n", e.what());
        return kExitNotConverged;
    }
    const auto rows = chfsi::comparison_rows(reuse ? &*reuse : nullptr, random ? &*random : nullptr);
    std::printf("config %s\n", chfsi::config_hash(rc).c_str());
    print_summary(rows, reuse.has_value(), random.has_value());
    if (!rc.output_csv.empty()) chfsi::write_sequence_csv(rc.output_csv, rows);
    return kExitOk;
}

int run_generate(const std::string& config_path, std::string out_dir) {
    chfsi::RunConfig rc = load_config(config_path);
    if (out_dir.empty()) out_dir = rc.output_dir;
    CHFSI_REQUIRE(!out_dir.empty(), "generate needs --out-dir or output_dir in the config");
    chfsi::write_sequence(chfsi::generate_sequence(rc.sequence), out_dir);
    std::printf("wrote %d problems to %s\n", rc.sequence.cycles, out_dir.c_str());
    return kExitOk;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw chfsi::IoError("cannot write " + path);
    f << text;
}

int run_bench_phases(const std::string& config_path, const std::string& csv) {
    chfsi::RunConfig rc = load_config(config_path);
    const auto b = chfsi::bench_phases(rc);
    std::ostringstream o;
    chfsi::write_phase_csv(o, b);
    emit(csv, o.str());
    return kExitOk;
}

int run_bench_scaling(const std::string& config_path, const std::vector<int>& workers, const std::string& csv) {
    chfsi::RunConfig rc = load_config(config_path);
    const auto r = chfsi::bench_scaling(rc, workers);
    std::ostringstream o;
    chfsi::write_scaling_csv(o, r);
    emit(csv, o.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chebyshev filtered subspace iteration for sequences of Hermitian eigenproblems"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve one standard or generalized eigenproblem");
    solve->add_option("--matrix-a", sa.matrix_a, "Hermitian matrix A (MatrixFile)")->required();
    solve->add_option("--matrix-b", sa.matrix_b, "SPD matrix B for A c = lambda B c (MatrixFile)");
    solve->add_option("--nev", sa.nev, "Number of lowest eigenpairs")->required();
    solve->add_option("--tol", sa.tol, "Residual tolerance")->capture_default_str();
    solve->add_option("--degree", sa.degree, "Chebyshev filter degree")->capture_default_str();
    solve->add_option("--workers", sa.workers, "Kernel worker threads (default CHFSI_WORKERS or 1)");
    solve->add_option("--start-vectors", sa.start_vectors, "Starting block (MatrixFile block)");
    solve->add_option("--report-csv", sa.report_csv, "Per-iteration CSV report");
    solve->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
    solve->add_option("--eigenvalues-out", sa.eigenvalues_out, "Eigenvalue text output")->capture_default_str();
    solve->add_option("--eigenvectors-out", sa.eigenvectors_out, "Eigenvector MatrixFile output")
        ->capture_default_str();
    solve->add_option("--max-iters", sa.max_iters, "Outer iteration budget")->capture_default_str();
    solve->add_option("--buffer", sa.buffer, "Extra search columns (negative: ceil(0.1 nev))")
        ->capture_default_str();
    solve->add_option("--lanczos-steps", sa.lanczos_steps, "Lanczos steps for the upper bound")
        ->capture_default_str();

    std::string seq_config, seq_mode, seq_csv;
    int seq_workers = 0;
    auto* sequence = app.add_subcommand("sequence", "Solve a synthetic sequence in reuse and/or random mode");
    sequence->add_option("--config", seq_config, "RunConfig file (defaults when omitted)");
    sequence->add_option("--mode", seq_mode, "reuse, random or both")
        ->check(CLI::IsMember({"reuse", "random", "both"}));
    sequence->add_option("--csv", seq_csv, "Per-cycle CSV output");
    sequence->add_option("--workers", seq_workers, "Kernel worker threads");

    std::string gen_config, gen_dir;
    auto* generate = app.add_subcommand("generate", "Write a synthetic sequence as MatrixFiles");
    generate->add_option("--config", gen_config, "RunConfig file");
    generate->add_option("--out-dir", gen_dir, "Output directory");

    std::string bp_config, bp_csv;
    auto* bphases = app.add_subcommand("bench-phases", "Phase-time breakdown of one solve");
    bphases->add_option("--config", bp_config, "RunConfig file");
    bphases->add_option("--csv", bp_csv, "CSV output (stdout when omitted)");

    std::string bs_config, bs_csv;
    std::vector<int> bs_workers{1, 2};
    auto* bscaling = app.add_subcommand("bench-scaling", "Wall time against worker count");
    bscaling->add_option("--config", bs_config, "RunConfig file");
    bscaling->add_option("--workers", bs_workers, "Worker counts")->delimiter(',')->capture_default_str();
    bscaling->add_option("--csv", bs_csv, "CSV output (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitInput;
    }

    try {
        if (*solve) return run_solve(sa);
        if (*sequence) return run_sequence(seq_config, seq_mode, seq_csv, seq_workers);
        if (*generate) return run_generate(gen_config, gen_dir);
        if (*bphases) return run_bench_phases(bp_config, bp_csv);
        if (*bscaling) return run_bench_scaling(bs_config, bs_workers, bs_csv);
    } catch (const chfsi::NotConverged& e) {
        std::fprintf(stderr, "chfsi: %s\n", e.what());
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "chfsi: error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
