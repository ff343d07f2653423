#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "snowflake/geometry.hpp"

namespace snowflake::cli {

/// Everything a command run needs; round-trips through JSON bit-for-bit.
struct RunConfig {
    int dim = 1;
    std::vector<std::array<double, 2>> domain{{0.0, 1.0}};
    std::string f_expr = "1";
    std::vector<std::string> g_exprs;
    double alpha = 1.0;
    std::vector<double> betas;
    std::optional<double> holder_f;           // declared C for f
    std::vector<double> holder_g;             // declared C per g (empty = estimate)
    std::optional<double> sup_f;
    double tol = 1e-4;
    int k_max = 12;
    int level = 6;                            // for fixed-level commands
    int workers = 0;                          // 0 = SNOWFLAKE_WORKERS or hardware
    std::string stopping = "either";          // certified | heuristic | either
    bool adaptive = false;
    std::uint64_t seed = 0;
    std::string format = "json";              // json | csv
    std::string out_path;

    // sweeps and command-specific knobs
    int m_lo = 1, m_hi = 6;                   // sharpness
    int resolution = 256;                     // oracle quadrature
    std::string oracle_mode = "quad";         // quad | brute
    int brute_cells = 1 << 14;
    std::string brute_tags = "random";        // random | midpoint
    std::vector<double> eps_list;             // approx
    double search_step_fraction = 1.0 / 64.0;
    int koch_lo = 0, koch_hi = 4;
    std::string chain_spec;                   // "w:[a,b]x[c,d];..."
    std::string staircase;                    // "geometric:r" | "power:p"
    int cutoff = 16;
    int approx_m_max = 0;                     // chain: >0 switches to the eps trace

    Box domain_box() const;
};

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// Parses "a,b;c,d" into per-axis bounds.
std::vector<std::array<double, 2>> parse_domain(const std::string& text);

/// Parses "w:[a,b]x[c,d];..." into chain terms (weight optional, default 1).
struct ParsedChainTerm {
    double weight = 1.0;
    std::vector<std::array<double, 2>> bounds;
};
std::vector<ParsedChainTerm> parse_chain_spec(const std::string& text);

/// Runs one command; returns the JSON report. Throws ConfigError /
/// ExponentError / ParseError on bad input.
nlohmann::json run_command(const std::string& command, const RunConfig& config);

/// Renders the report per config.format ("csv" flattens sweep rows).
std::string render_output(const nlohmann::json& report, const std::string& format);

/// Full CLI entry: parse args, run, write output. Exit codes: 0 ok,
/// 2 config/parse error, 3 exponent sum too small, 4 refinement budget
/// exhausted (best-effort output still written).
int main_entry(const std::vector<std::string>& args);

}  // namespace snowflake::cli
