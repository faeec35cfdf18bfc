#include "cfuse/budget.hpp"

#include <atomic>

namespace cfuse {

namespace {
std::atomic<uint64_t> g_default_limit{1000000};
}

uint64_t default_enum_limit() { return g_default_limit.load(std::memory_order_relaxed); }

void set_default_enum_limit(uint64_t limit) {
  g_default_limit.store(limit, std::memory_order_relaxed);
}

}  // namespace cfuse
