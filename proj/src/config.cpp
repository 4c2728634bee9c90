#include "chfsi/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace chfsi {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v, int line) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("line " + std::to_string(line) + ": invalid value '" + std::string(v) +
                          "' for " + std::string(key));
    return out;
}

double parse_double(std::string_view key, std::string_view v, int line) {
    // from_chars for double is unavailable on older toolchains.
    std::string s(v);
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ConfigError("line " + std::to_string(line) + ": invalid value '" + s + "' for " +
                          std::string(key));
    return d;
}

bool parse_bool(std::string_view key, std::string_view v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": invalid boolean '" + std::string(v) +
                      "' for " + std::string(key));
}

std::string fmt_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

}  // namespace

RunMode parse_mode(std::string_view text) {
    if (text == "reuse") return RunMode::Reuse;
    if (text == "random") return RunMode::Random;
    if (text == "both") return RunMode::Both;
    throw ConfigError("mode must be reuse, random or both, not '" + std::string(text) + "'");
}

std::string_view mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Reuse: return "reuse";
        case RunMode::Random: return "random";
        case RunMode::Both: return "both";
    }
    return "both";
}

RunConfig parse_run_config(std::string_view text) {
    struct Entry {
        std::string value;
        int line;
    };
    std::vector<std::pair<std::string, Entry>> entries;
    std::map<std::string, int> seen;

    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (seen.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        seen[key] = line_no;
        entries.push_back({key, {value, line_no}});
    }

    RunConfig c;
    for (const auto& [key, e] : entries)
        if (key == "preset") {
            try {
                c.sequence = sequence_preset(e.value);
            } catch (const ContractViolation& err) {
                throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
            }
            c.preset = e.value;
            c.solver.nev = c.sequence.nev;
        }

    for (const auto& [key, e] : entries) {
        const std::string& v = e.value;
        const int ln = e.line;
        if (key == "preset") continue;
        else if (key == "n") c.sequence.n = parse_number<Index>(key, v, ln);
        else if (key == "cycles") c.sequence.cycles = parse_number<int>(key, v, ln);
        else if (key == "nev") c.sequence.nev = parse_number<Index>(key, v, ln);
        else if (key == "delta0") c.sequence.delta0 = parse_double(key, v, ln);
        else if (key == "rho") c.sequence.rho = parse_double(key, v, ln);
        else if (key == "seed") c.sequence.seed = parse_number<std::uint64_t>(key, v, ln);
        else if (key == "kind") {
            if (v == "standard") c.sequence.kind = ProblemKind::Standard;
            else if (v == "generalized") c.sequence.kind = ProblemKind::Generalized;
            else throw ConfigError("line " + std::to_string(ln) + ": kind must be standard or generalized");
        } else if (key == "vary_b") c.sequence.vary_b = parse_bool(key, v, ln);
        else if (key == "tol") c.solver.tol = parse_double(key, v, ln);
        else if (key == "max_outer_iters") c.solver.max_outer_iters = parse_number<int>(key, v, ln);
        else if (key == "degree") c.solver.degree = parse_number<int>(key, v, ln);
        else if (key == "lanczos_steps") c.solver.lanczos_steps = parse_number<int>(key, v, ln);
        else if (key == "buffer") c.solver.buffer = parse_number<Index>(key, v, ln);
        else if (key == "solver_seed") c.solver.seed = parse_number<std::uint64_t>(key, v, ln);
        else if (key == "workers") c.solver.workers = parse_number<int>(key, v, ln);
        else if (key == "mode") {
            try {
                c.mode = parse_mode(v);
            } catch (const ConfigError& err) {
                throw ConfigError("line " + std::to_string(ln) + ": " + err.what());
            }
        } else if (key == "output_csv") c.output_csv = v;
        else if (key == "output_dir") c.output_dir = v;
        else if (key == "repeats") c.repeats = parse_number<int>(key, v, ln);
        else throw ConfigError("line " + std::to_string(ln) + ": unknown key '" + key + "'");
    }
    c.solver.nev = c.sequence.nev;

    try {
        c.sequence.validate();
        c.solver.validate(c.sequence.n);
    } catch (const ContractViolation& err) {
        throw ConfigError(std::string("invalid configuration: ") + err.what());
    }
    if (c.repeats < 1) throw ConfigError("repeats must be at least 1");
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

std::string to_text(const RunConfig& c) {
    std::ostringstream o;
    o << "preset = " << c.preset << "\n"
      << "n = " << c.sequence.n << "\n"
      << "cycles = " << c.sequence.cycles << "\n"
      << "nev = " << c.sequence.nev << "\n"
      << "delta0 = " << fmt_double(c.sequence.delta0) << "\n"
      << "rho = " << fmt_double(c.sequence.rho) << "\n"
      << "seed = " << c.sequence.seed << "\n"
      << "kind = " << (c.sequence.kind == ProblemKind::Standard ? "standard" : "generalized") << "\n"
      << "vary_b = " << (c.sequence.vary_b ? "true" : "false") << "\n"
      << "tol = " << fmt_double(c.solver.tol) << "\n"
      << "max_outer_iters = " << c.solver.max_outer_iters << "\n"
      << "degree = " << c.solver.degree << "\n"
      << "lanczos_steps = " << c.solver.lanczos_steps << "\n"
      << "buffer = " << c.solver.buffer << "\n"
      << "solver_seed = " << c.solver.seed << "\n"
      << "workers = " << c.solver.workers << "\n"
      << "mode = " << mode_name(c.mode) << "\n"
      << "repeats = " << c.repeats << "\n";
    if (!c.output_csv.empty()) o << "output_csv = " << c.output_csv << "\n";
    if (!c.output_dir.empty()) o << "output_dir = " << c.output_dir << "\n";
    return o.str();
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int workers_from_env(int fallback) {
    const char* env = std::getenv("CHFSI_WORKERS");
    if (env == nullptr || *env == '\0') return fallback;
    int v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) return fallback;
    return v;
}

}  // namespace chfsi
