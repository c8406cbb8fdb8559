#ifndef HEUN_VERIFY_HPP
#define HEUN_VERIFY_HPP

#include <string>
#include <vector>

namespace heun {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;   // worst observed error (vs the check's own bound)
    double bound = 0.0;
    std::string detail;
};

/// Named invariant suites: elliptic, bridge, invariant, spectral, bethe, trig,
/// perturb, or all.  Deterministic given the seed.
std::vector<CheckResult> run_suite(const std::string& suite, unsigned seed = 0);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace heun

#endif
