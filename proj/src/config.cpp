#include "apx/config.hpp"

#include <cstdlib>
#include <string>

namespace apx {

namespace {

std::size_t g_override = 0;

std::size_t env_cap() {
    static std::size_t cached = [] {
        const char* v = std::getenv("APX_CAP");
        if (v == nullptr) return std::size_t{20};
        try {
            long parsed = std::stol(v);
            if (parsed >= 1 && parsed <= 30) return static_cast<std::size_t>(parsed);
        } catch (...) {
        }
        return std::size_t{20};
    }();
    return cached;
}

} // namespace

std::size_t enumeration_cap() { return g_override != 0 ? g_override : env_cap(); }

void set_enumeration_cap_for_testing(std::size_t cap) { g_override = cap; }

} // namespace apx
