#ifndef APX_CONFIG_HPP
#define APX_CONFIG_HPP

#include <cstddef>

namespace apx {

// Enumeration cap for exhaustive operations (exact counting, function
// equality). Overridable via the APX_CAP environment variable.
std::size_t enumeration_cap();

// For tests that need a different cap without touching the environment.
void set_enumeration_cap_for_testing(std::size_t cap);

} // namespace apx

#endif
