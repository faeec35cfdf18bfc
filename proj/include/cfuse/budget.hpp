#pragma once

#include <cstdint>
#include <stdexcept>

namespace cfuse {

// Every core routine here is exponential, so every exhaustive pass runs under
// an explicit cap and fails loudly instead of truncating silently.
struct BudgetExceeded : std::runtime_error {
  uint64_t limit;
  explicit BudgetExceeded(uint64_t lim)
      : std::runtime_error("enum budget exceeded (" + std::to_string(lim) +
                           " assignments); raise --max-enum to continue"),
        limit(lim) {}
};

// Process-wide default cap on assignments per exhaustive pass.
uint64_t default_enum_limit();
void set_default_enum_limit(uint64_t limit);

// One pass's counter. Top-level operations create a fresh Budget and thread
// it through their enumerations.
class Budget {
 public:
  Budget() : limit_(default_enum_limit()) {}
  explicit Budget(uint64_t limit) : limit_(limit) {}

  void charge(uint64_t n = 1) {
    used_ += n;
    if (used_ > limit_) {
      throw BudgetExceeded(limit_);
    }
  }

  uint64_t used() const { return used_; }
  uint64_t limit() const { return limit_; }

 private:
  uint64_t limit_;
  uint64_t used_ = 0;
};

}  // namespace cfuse
