#include "qbailey/report.hpp"

#include <sstream>

namespace qbailey {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string VerificationReport::to_json() const {
    std::ostringstream out;
    out << "{\"cell\": \"" << json_escape(cell) << "\", \"status\": \"" << status << "\"";
    if (!detail.empty()) out << ", \"detail\": \"" << json_escape(detail) << "\"";
    if (status == "fail")
        out << ", \"mismatch\": {\"exponent_num\": " << mismatch_num
            << ", \"denom\": " << mismatch_den << ", \"lhs\": \"" << lhs << "\", \"rhs\": \""
            << rhs << "\"}";
    out << ", \"wall_ms\": " << wall_ms << "}";
    return out.str();
}

VerificationReport report_from_compare(const std::string& cell, const CompareResult& cmp,
                                       double wall_ms) {
    VerificationReport r;
    r.cell = cell;
    r.wall_ms = wall_ms;
    if (cmp.equal) {
        r.status = "pass";
    } else {
        r.status = "fail";
        r.mismatch_num = cmp.mismatch_num;
        r.mismatch_den = cmp.denom;
        r.lhs = cmp.lhs.get_str();
        r.rhs = cmp.rhs.get_str();
        r.detail = "first mismatch at q^(" + std::to_string(cmp.mismatch_num) + "/" +
                   std::to_string(cmp.denom) + ")";
    }
    return r;
}

}  // namespace qbailey
