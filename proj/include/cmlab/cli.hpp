#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <vector>

namespace cmlab {

struct Config {
    int digits = 60;
    int padic_precision = 12;
    long series_truncation = 0;  // 0: max(p^2 + 2, 64) for the prime at hand
    mpz_class denominator_bound = 100000000;
    double tolerance_fraction = 1.0 / 3;  // pass when residual < 10^-(digits * fraction)
    long truncation_norm_bound = 200000;  // largest ideal norm a direct L-sum may use
    int workers = 1;
    std::string db_path;  // empty: CurveDB::default_path()
    bool timing = true;
    bool csv = false;

    size_t series_for(long p) const;
    double tolerance_log10() const { return -digits * tolerance_fraction; }
};

// Environment overrides (CMHL_DIGITS, CMHL_WORKERS, CMHL_DB, CMHL_PADIC_PRECISION,
// CMHL_SERIES_TRUNCATION, CMHL_DENOMINATOR_BOUND, CMHL_TOLERANCE_FRACTION).
void apply_env(Config& c);
// Keys as in the report's config block. InvalidArgument on unknown keys.
void apply_config_file(Config& c, const std::string& path);

// Exit codes.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// args excludes the program name. Reports go to out, usage errors to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmlab
