#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "chfsi/io.hpp"
#include "chfsi/sequence.hpp"

namespace chfsi {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class RunMode { Reuse, Random, Both };

/// Everything a sequence or benchmark run needs, read from a `key = value` file.
///
/// Defaults live in the member initializers here and in SequenceSpec /
/// SolverConfig; `preset` is applied before any other key regardless of
/// where it appears.
struct RunConfig {
    std::string preset = "default";
    SequenceSpec sequence = sequence_preset("default");
    SolverConfig solver = default_solver();
    RunMode mode = RunMode::Both;
    std::string output_csv;
    std::string output_dir;
    int repeats = 5;

    static SolverConfig default_solver() {
        SolverConfig c;
        c.nev = 35;
        return c;
    }
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);
/// Canonical `key = value` text; parse_run_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);
/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// CHFSI_WORKERS if set to a positive integer, else `fallback`.
int workers_from_env(int fallback = 1);

RunMode parse_mode(std::string_view text);
std::string_view mode_name(RunMode mode);

}  // namespace chfsi
