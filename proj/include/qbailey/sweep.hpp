#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbailey/report.hpp"

namespace qbailey {

/* Parsed sweep configuration. Text format: one `key = value` per line,
 * `#` comments, values either scalars, comma lists, or a..b spans.
 * `order_units` is the truncation bound in whole powers of q; each target
 * maps it onto its own exponent grid (denominator 2N for the lattice
 * targets, 4N(N+2) for string functions, 1 for the N=1 product families).
 */
struct SweepConfig {
    std::string target;
    std::map<std::string, std::vector<long>> ranges;
    long order_units = 20;
    long lambda_max_weight = 2;
    int workers = 1;
    unsigned long seed = 1;
    long cases = 200;
    std::string out;  // JSON-lines report path; empty = stdout only

    static SweepConfig parse_file(const std::string& path);
    static SweepConfig parse(std::istream& in, const std::string& name);

    std::vector<long> range_or(const std::string& key, std::vector<long> fallback) const;
};

struct SweepResult {
    std::vector<VerificationReport> reports;
    long passed = 0;
    long failed = 0;
    long skipped = 0;
    long unverified = 0;
    long errored = 0;

    int exit_code() const;
};

// Expands the target grid, evaluates every cell (worker-parallel, content
// deterministic), and returns reports sorted by cell key.
SweepResult run_sweep(const SweepConfig& config);

// Serializes reports as JSON lines.
void write_reports(const SweepResult& result, std::ostream& out);

}  // namespace qbailey
