#ifndef APX_SELFTEST_HPP
#define APX_SELFTEST_HPP

#include <string>
#include <vector>

namespace apx {

struct SelftestCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestResult {
    std::vector<SelftestCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Runs the invariant suites. `full` raises the caps and adds the reduction
// soundness sweep; `inject_fault` swaps in a deliberately skewed oracle so
// the local-consistency suite demonstrably fails.
SelftestResult run_selftest(bool full, bool inject_fault, uint64_t seed);

} // namespace apx

#endif
