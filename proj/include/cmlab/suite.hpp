#pragma once

#include "cmlab/cli.hpp"
#include "cmlab/curvedb.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cmlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    nlohmann::ordered_json detail;
    double seconds = 0;
};

// Acceptance criteria 1..9. Criterion 10 (determinism of this report across runs
// and worker counts) needs separate processes and lives in the acceptance driver.
std::vector<CriterionResult> run_suite(const CurveDB& db, const Config& cfg);

// Seconds are written only when cfg.timing is set.
nlohmann::ordered_json suite_json(const std::vector<CriterionResult>& r, const Config& cfg);

}  // namespace cmlab
