#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace orbitchaos::cli {

inline constexpr std::uint64_t kAcceptanceSeed = 20240917;

struct CriterionResult {
    std::string id;  ///< "AC1" .. "AC11"
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = kAcceptanceSeed;
};

/// Ids in order, "AC1" .. "AC11".
std::vector<std::string> criterion_ids();

/// Runs one criterion; unknown ids throw ParseError. A criterion that throws
/// is reported as failed with the error message as detail.
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& options);

/// Runs the listed criteria (all when `only` is empty).
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<std::string>& only = {});

/// "PASS AC1  title  detail  (1.23 s)"
std::string format_result(const CriterionResult& r);

}  // namespace orbitchaos::cli
