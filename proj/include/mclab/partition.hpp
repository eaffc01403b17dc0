#pragma once

#include <cstdint>
#include <vector>

namespace mclab {

// Integer partition, parts non-increasing. Multiplicities are derived by
// scanning runs of equal parts (see for_each_run).
struct Partition {
  std::vector<std::uint32_t> parts;

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto p : parts) s += p;
    return s;
  }

  // Calls fn(part_value, multiplicity) for each distinct part, largest first.
  template <class Fn>
  void for_each_run(Fn&& fn) const {
    std::size_t i = 0;
    while (i < parts.size()) {
      std::size_t j = i;
      while (j < parts.size() && parts[j] == parts[i]) ++j;
      fn(parts[i], static_cast<std::uint32_t>(j - i));
      i = j;
    }
  }
};

// Streams all partitions of n in reverse-lexicographic order, (n) first and
// (1,1,...,1) last; n = 0 yields exactly the empty partition. Constant memory,
// amortized O(1) per partition.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(std::uint32_t n);

  // Fills `out` with the next partition; false once the stream is exhausted.
  bool next(Partition& out);

 private:
  std::uint32_t n_;
  bool first_ = true;
  bool done_ = false;
  std::vector<std::uint32_t> parts_;
  void advance();
};

// Convenience: fn(const Partition&) over all partitions of n.
template <class Fn>
void for_each_partition(std::uint32_t n, Fn&& fn) {
  PartitionEnumerator e(n);
  Partition p;
  while (e.next(p)) fn(p);
}

std::uint64_t count_partitions(std::uint32_t n);

}  // namespace mclab
