#ifndef TFIM_ACCEPTANCE_HPP
#define TFIM_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace tfim::acceptance {

struct CriterionResult {
    std::string id;
    std::string detail;  // measured values and bounds
    bool passed = false;
    double seconds = 0.0;
};

struct Report {
    std::vector<CriterionResult> results;
    bool all_passed() const;
};

// Runs the verification suite at desk scale, printing one pass/fail line
// per criterion to `progress` as results arrive. `quick` restricts to the
// fast subset (a couple of minutes), `full` runs everything.
Report run(bool quick, std::ostream* progress);

}  // namespace tfim::acceptance

#endif
