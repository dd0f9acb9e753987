#pragma once

// Reproduction suite: each criterion recomputes a model identity or a
// reference number from scratch and compares it with its tolerance.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace siq {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string measured;
    std::string expected;
    double seconds = 0;
    /// Wall-clock limit; a criterion that takes longer fails.
    double time_limit = 0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20180126;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;
    std::function<CriterionResult(const AcceptanceOptions &)> run;
};

const std::vector<Criterion> &acceptance_criteria();

/// Runs the selected criteria (all when `ids` is empty). A criterion that
/// throws is reported as failed with the exception text.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &opts, const std::vector<int> &ids = {});

/// "[PASS] 3 conditional phase ... measured ... expected ... (0.12 s)"
std::string format_result(const CriterionResult &r);

}  // namespace siq
