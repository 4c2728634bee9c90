#include "chfsi/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "chfsi/io.hpp"

namespace chfsi {

namespace {

// splitmix64 finalizer; decorrelates the per-cycle random streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1) + 0xbf58476d1ce4e5b9ULL * index;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum Stream : std::uint64_t { kSpectrum, kBasis, kPerturbA, kBaseB, kPerturbB, kSolver };

/// Hermitian Wigner matrix with spectral norm close to 1.
Matrix unit_wigner(Index n, std::uint64_t seed) {
    Matrix g = random_block(n, n, seed);
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    Matrix e(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) e(i, j) = 0.5 * scale * (g(i, j) + std::conj(g(j, i)));
    return e;
}

/// M^H M / (4n), positive semidefinite with spectral norm close to 1.
Matrix unit_gram(Index n, std::uint64_t seed) {
    const Matrix m = random_block(n, n, seed);
    Matrix g = multiply(m, Op::ConjTrans, m, Op::None);
    const double scale = 1.0 / (4.0 * static_cast<double>(n));
    for (Complex& z : g.values()) z *= scale;
    return g;
}

Matrix add_scaled(const Matrix& base, double scale, const Matrix& step) {
    Matrix out(base);
    if (scale == 0.0) return out;
    auto o = out.values();
    auto s = step.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += scale * s[i];
    return out;
}

const char* kind_name(ProblemKind k) {
    return k == ProblemKind::Standard ? "standard" : "generalized";
}

}  // namespace

void SequenceSpec::validate() const {
    CHFSI_REQUIRE(n >= 2, "sequence order n must be at least 2");
    CHFSI_REQUIRE(cycles >= 1, "sequence needs at least one cycle");
    CHFSI_REQUIRE(nev >= 1 && nev < n, "sequence nev must lie in [1, n)");
    CHFSI_REQUIRE(delta0 >= 0.0, "delta0 must be non-negative");
    CHFSI_REQUIRE(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
}

double SequenceSpec::perturbation_scale(int cycle) const {
    return delta0 * std::pow(rho, cycle - 1);
}

SequenceSpec sequence_preset(std::string_view name) {
    SequenceSpec s;
    if (name == "default") return s;
    auto sized = [&](std::string_view prefix, double fraction, int cycles) -> std::optional<SequenceSpec> {
        if (!name.starts_with(prefix)) return std::nullopt;
        const std::string_view size = name.substr(prefix.size());
        for (Index n : {500, 1000, 2000}) {
            if (size == std::to_string(n)) {
                SequenceSpec p;
                p.n = n;
                p.nev = static_cast<Index>(std::lround(fraction * static_cast<double>(n)));
                p.cycles = cycles;
                return p;
            }
        }
        return std::nullopt;
    };
    if (auto p = sized("au98ag10-", 0.07, 25)) return *p;
    if (auto p = sized("na15cl14li-", 0.03, 13)) return *p;
    throw ContractViolation("unknown sequence preset '" + std::string(name) + "'");
}

std::vector<std::string> sequence_preset_names() {
    std::vector<std::string> names{"default"};
    for (const char* base : {"au98ag10-", "na15cl14li-"})
        for (int n : {500, 1000, 2000}) names.push_back(base + std::to_string(n));
    return names;
}

std::vector<double> initial_spectrum(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::vector<double> values(static_cast<std::size_t>(n));
    const double dn = static_cast<double>(n);
    for (Index i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5 + jitter(rng)) / dn;
        // Sparse low end, dense bulk: lambda = -1 + 11 sqrt(x) spans [-1, 10].
        values[static_cast<std::size_t>(i)] = -1.0 + 11.0 * std::sqrt(x);
    }
    return values;
}

ProblemSequence generate_sequence(const SequenceSpec& spec) {
    spec.validate();
    const Index n = spec.n;
    ProblemSequence seq;
    seq.spec = spec;
    seq.problems.reserve(static_cast<std::size_t>(spec.cycles));

    const auto spectrum = initial_spectrum(n, mix_seed(spec.seed, kSpectrum, 0));
    const Matrix u = householder_qr(random_block(n, n, mix_seed(spec.seed, kBasis, 0)));
    Matrix ul(u);
    for (Index j = 0; j < n; ++j)
        for (Complex& z : ul.col(j)) z *= spectrum[static_cast<std::size_t>(j)];
    Matrix a = multiply(ul, Op::None, u, Op::ConjTrans);

    std::optional<Matrix> b;
    if (spec.kind == ProblemKind::Generalized) {
        const Matrix m = random_block(n, n, mix_seed(spec.seed, kBaseB, 0));
        Matrix g = multiply(m, Op::ConjTrans, m, Op::None);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (Index j = 0; j < n; ++j) {
            for (Complex& z : g.col(j)) z *= inv_n;
            g(j, j) += 1.0;
        }
        b = std::move(g);
    }

    for (int cycle = 1; cycle <= spec.cycles; ++cycle) {
        Problem p{HermitianMatrix::symmetrize(a), std::nullopt};
        if (b) p.b = HermitianMatrix::symmetrize(*b);
        seq.problems.push_back(std::move(p));
        if (cycle == spec.cycles) break;

        const double scale = spec.perturbation_scale(cycle);
        if (scale > 0.0) {
            a = add_scaled(a, scale, unit_wigner(n, mix_seed(spec.seed, kPerturbA, cycle)));
            if (b && spec.vary_b)
                b = add_scaled(*b, scale, unit_gram(n, mix_seed(spec.seed, kPerturbB, cycle)));
        }
    }
    return seq;
}

std::vector<double> vector_angles(ConstMatrixView prev, ConstMatrixView curr) {
    CHFSI_REQUIRE(prev.rows() == curr.rows() && prev.cols() == curr.cols(),
                  "vector_angles: block shapes differ");
    std::vector<double> out(static_cast<std::size_t>(prev.cols()));
    for (Index j = 0; j < prev.cols(); ++j) {
        const double overlap = std::abs(dot(prev.col(j), curr.col(j)));
        out[static_cast<std::size_t>(j)] = std::acos(std::min(1.0, overlap));
    }
    return out;
}

double median(std::vector<double> values) {
    CHFSI_REQUIRE(!values.empty(), "median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

Matrix unit_columns(Matrix m) {
    for (Index j = 0; j < m.cols(); ++j) {
        const double nrm = column_norm(m, j);
        if (nrm > 0.0)
            for (Complex& z : m.col(j)) z /= nrm;
    }
    return m;
}

}  // namespace

SequenceReport solve_sequence(const ProblemSequence& seq, const SolverConfig& config,
                              ReuseMode mode) {
    SequenceReport out;
    out.mode = mode;
    std::optional<Matrix> start;
    std::optional<SpectralEstimates> prior;

    for (std::size_t l = 0; l < seq.problems.size(); ++l) {
        const Problem& p = seq.problems[l];
        CHFSI_REQUIRE(p.a.order() == seq.problems.front().a.order(),
                      "sequence problems must share one order");
        SolverConfig cfg = config;
        cfg.seed = mix_seed(config.seed, kSolver, l + 1);

        CycleResult cycle;
        cycle.cycle = static_cast<int>(l + 1);
        Matrix block;
        if (p.b) {
            GeneralizedResult r = solve_generalized(p.a, *p.b, start, cfg, prior);
            cycle.report = std::move(r.report);
            cycle.eigenvalues = std::move(r.eigenvalues);
            cycle.eigenvectors = std::move(r.eigenvectors);
            block = std::move(r.search_block);
            prior = r.estimates;
        } else {
            SolveResult r = chfsi_solve(p.a, start, cfg, prior);
            cycle.report = std::move(r.report);
            cycle.eigenvalues = std::move(r.eigenvalues);
            cycle.eigenvectors = std::move(r.eigenvectors);
            block = std::move(r.search_block);
            prior = r.estimates;
        }

        if (!out.cycles.empty()) {
            const Matrix& previous = out.cycles.back().eigenvectors;
            if (p.b)
                cycle.angles = vector_angles(unit_columns(previous), unit_columns(cycle.eigenvectors));
            else
                cycle.angles = vector_angles(previous, cycle.eigenvectors);
            cycle.median_angle = median(cycle.angles);
        }

        if (mode == ReuseMode::Reuse) {
            start = std::move(block);
        } else {
            prior.reset();
        }
        out.cycles.push_back(std::move(cycle));
    }
    return out;
}

std::vector<CycleComparison> compare_modes(const SequenceReport& reuse,
                                           const SequenceReport& random) {
    CHFSI_REQUIRE(reuse.cycles.size() == random.cycles.size(),
                  "compare_modes: reports cover different cycle counts");
    std::vector<CycleComparison> out;
    for (std::size_t l = 0; l < reuse.cycles.size(); ++l) {
        const auto& ru = reuse.cycles[l];
        const auto& rr = random.cycles[l];
        CycleComparison c;
        c.cycle = ru.cycle;
        c.reuse_matvecs = ru.report.total_matvecs;
        c.random_matvecs = rr.report.total_matvecs;
        c.reuse_iters = ru.report.outer_iterations();
        c.random_iters = rr.report.outer_iterations();
        if (l > 0 && c.reuse_matvecs > 0)
            c.work_ratio = static_cast<double>(c.random_matvecs) / static_cast<double>(c.reuse_matvecs);
        c.median_angle = ru.median_angle;
        out.push_back(c);
    }
    return out;
}

void write_sequence(const ProblemSequence& seq, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const auto& s = seq.spec;
    std::ostringstream manifest;
    manifest.precision(17);
    manifest << "CHFSI-SEQ1\n"
             << "n " << s.n << "\n"
             << "cycles " << seq.problems.size() << "\n"
             << "nev " << s.nev << "\n"
             << "delta0 " << s.delta0 << "\n"
             << "rho " << s.rho << "\n"
             << "seed " << s.seed << "\n"
             << "kind " << kind_name(s.kind) << "\n"
             << "vary_b " << (s.vary_b ? 1 : 0) << "\n";
    for (std::size_t l = 0; l < seq.problems.size(); ++l) {
        char a_name[32];
        std::snprintf(a_name, sizeof a_name, "cycle_%03zu_A.chm", l + 1);
        write_matrix((fs::path(directory) / a_name).string(), seq.problems[l].a.matrix(),
                     MatrixKind::Hermitian);
        manifest << "problem " << (l + 1) << " " << a_name;
        if (seq.problems[l].b) {
            char b_name[32];
            std::snprintf(b_name, sizeof b_name, "cycle_%03zu_B.chm", l + 1);
            write_matrix((fs::path(directory) / b_name).string(), seq.problems[l].b->matrix(),
                         MatrixKind::Spd);
            manifest << " " << b_name;
        }
        manifest << "\n";
    }
    std::ofstream f(fs::path(directory) / "manifest.txt");
    f << manifest.str();
    if (!f) throw IoError("cannot write manifest in " + directory);
}

ProblemSequence read_sequence(const std::string& directory) {
    namespace fs = std::filesystem;
    std::ifstream f(fs::path(directory) / "manifest.txt");
    if (!f) throw IoError("cannot open manifest in " + directory);
    std::string line;
    std::getline(f, line);
    if (line != "CHFSI-SEQ1") throw FormatError("manifest: bad magic line '" + line + "'");

    ProblemSequence seq;
    auto& s = seq.spec;
    int cycles = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "n") ls >> s.n;
        else if (key == "cycles") ls >> cycles;
        else if (key == "nev") ls >> s.nev;
        else if (key == "delta0") ls >> s.delta0;
        else if (key == "rho") ls >> s.rho;
        else if (key == "seed") ls >> s.seed;
        else if (key == "kind") {
            std::string k;
            ls >> k;
            if (k == "standard") s.kind = ProblemKind::Standard;
            else if (k == "generalized") s.kind = ProblemKind::Generalized;
            else throw FormatError("manifest: unknown kind '" + k + "'");
        } else if (key == "vary_b") {
            int v = 0;
            ls >> v;
            s.vary_b = v != 0;
        } else if (key == "problem") {
            int index = 0;
            std::string a_name, b_name;
            ls >> index >> a_name >> b_name;
            Problem p{read_hermitian((fs::path(directory) / a_name).string()), std::nullopt};
            if (!b_name.empty()) p.b = read_hermitian((fs::path(directory) / b_name).string());
            seq.problems.push_back(std::move(p));
            continue;
        } else {
            throw FormatError("manifest: unknown key '" + key + "'");
        }
        if (ls.fail()) throw FormatError("manifest: malformed line '" + line + "'");
    }
    s.cycles = cycles;
    if (static_cast<int>(seq.problems.size()) != cycles)
        throw FormatError("manifest: cycle count disagrees with the problem list");
    return seq;
}

}  // namespace chfsi
