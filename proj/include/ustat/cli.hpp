#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace ustat::cli {

// Fully resolved invocation of one subcommand. JSON keys mirror the flag
// names, and a parsed config round-trips through its JSON representation
// losslessly (the echo each `--format json` run emits is this object plus an
// "outputs" member, so an echo file can be fed back via --config).
struct RunConfig {
    std::string subcommand;
    std::string format = "text";  // text | csv | json
    std::uint64_t seed = 0;

    std::string kernel;
    std::string input;
    std::string type;  // bound kind
    std::string dist;

    std::optional<std::int64_t> n;
    std::optional<int> m;
    std::optional<double> delta;
    std::optional<double> sup_norm;
    std::optional<double> variance;
    std::optional<double> c1;
    std::optional<double> c2;
    std::optional<double> tail_at;
    std::optional<int> blocks;
    std::optional<std::int64_t> trials;
    std::optional<double> kernel_mean;
    std::vector<std::int64_t> n_grid;
    std::optional<int> q;
    std::optional<int> probes;
    std::optional<std::int64_t> samples;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
void from_json(const nlohmann::json& j, RunConfig& cfg);

// Raised for -h/--help; carries the text to print before exiting 0.
struct HelpRequested {
    std::string text;
};

// Parses a full argument vector (without argv[0]). A --config <path> JSON
// file supplies defaults; explicit flags override it. Throws ustat::Error on
// usage problems and HelpRequested for help flags.
RunConfig parse_args(const std::vector<std::string>& args);

// Executes a resolved config, writing the subcommand's output to `out`.
// Returns the process exit code.
int run_command(const RunConfig& cfg, std::ostream& out);

}  // namespace ustat::cli
