#pragma once

#include <random>
#include <vector>

#include "wach/transform.hpp"

namespace wach {

struct CheckResult {
    std::string name;
    bool pass = false;
    // smallest valuation observed in the defect (large when it vanished)
    int residual = 0;
    std::string note;
};

// Random integral series / measures used by the property checks.
PiSeries random_series(std::mt19937_64& rng, int64_t p, int D, int prec, int max_deg = -1);
// (1+pi)^j phi(pi^e h): killed by psi, divisible by pi^e.
PiSeries random_psi0(std::mt19937_64& rng, int64_t p, int D, int prec, int pi_pow = 0);
// psi = 0, divisible by pi, with generically nonvanishing level-1 values.
PiSeries random_psi0_generic(std::mt19937_64& rng, int64_t p, int D, int prec);
IwasawaElement random_bounded(std::mt19937_64& rng, int64_t p, int X, int prec);

// The named identity battery at one configuration. `instances` scales the
// randomized families; every check is deterministic for a fixed seed.
std::vector<CheckResult> run_invariant_suite(int64_t p, int k, const PAdic& ap,
                                             const PrecisionBudget& budget, uint64_t seed,
                                             int instances);

bool all_pass(const std::vector<CheckResult>& results);

} // namespace wach
