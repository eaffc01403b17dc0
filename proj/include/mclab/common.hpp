#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mclab {

// Thrown when a mathematical invariant the program is supposed to uphold is
// observed to fail (as opposed to bad user input, which throws
// std::invalid_argument / std::domain_error). The CLI maps this to exit 2.
class invariant_error : public std::runtime_error {
 public:
  explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

namespace caps {
// Hard ceilings for super-polynomial code paths. Overridable per call; the
// defaults keep worst cases in the "seconds to a minute" range on one core.
inline constexpr std::uint32_t brute_force_order = 40;   // partition sums, p(40)=37338
inline constexpr std::uint32_t exhaustive_free_indices = 30;  // 2^30 sequences
}  // namespace caps

}  // namespace mclab
