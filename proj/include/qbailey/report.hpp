#pragma once

#include <string>

#include "qbailey/series.hpp"

namespace qbailey {

/* Outcome of one truncated identity check. pass means exact window
 * equality; there is no tolerance anywhere. unverified-bound marks cells
 * where the negative-eta termination certificate failed. */
struct VerificationReport {
    std::string cell;
    std::string status;  // pass | fail | skipped | unverified-bound | error
    std::string detail;
    long mismatch_num = 0;
    long mismatch_den = 1;
    std::string lhs;
    std::string rhs;
    double wall_ms = 0.0;

    bool passed() const { return status == "pass"; }
    std::string to_json() const;
};

VerificationReport report_from_compare(const std::string& cell, const CompareResult& cmp,
                                       double wall_ms = 0.0);

}  // namespace qbailey
