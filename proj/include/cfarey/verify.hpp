#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfarey/torus.hpp"

namespace cfarey {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    // true when the failure is the documented discrepancy between the source
    // counting constant and the deduplicated point set (criterion 1)
    bool knownDiscrepancy = false;
    double seconds = 0;
    std::string details;
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    bool allPass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
    bool allPassExceptKnown() const {
        for (const auto& r : results)
            if (!r.pass && !r.knownDiscrepancy) return false;
        return true;
    }
};

/// The full acceptance suite (all nine criteria at their pinned scales).
/// scratchDir holds the determinism-check artifacts.
AcceptanceReport run_acceptance(const QuadratureConfig& quad, const std::string& scratchDir);

/// Ring-level checks for one discriminant (constants, zeta, systole).
AcceptanceReport run_ring_suite(std::int64_t disc);

void write_report_json(const AcceptanceReport& report, const std::string& path,
                       const std::string& metaHeader);

} // namespace cfarey
