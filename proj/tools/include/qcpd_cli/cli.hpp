#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcpd::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_usage = 2,
    exit_io = 3,
    exit_parse = 4,
};

/// Runs the qcpd command line on `args` (without the program name).
/// Summaries go to `out`, diagnostics to `err`; returns the exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

/// Parses "default", a comma list "0.1,0.2" or a range "start:stop:step"
/// (inclusive, tolerant to round-off at the end point). Throws DomainError.
[[nodiscard]] std::vector<double> parse_grid(const std::string &text);

/// Comma list or "start:stop:step" range of positive integers.
[[nodiscard]] std::vector<int> parse_int_list(const std::string &text);

/// Manifest path written next to an output file.
[[nodiscard]] std::string manifest_path(const std::string &output);

} // namespace qcpd::cli
