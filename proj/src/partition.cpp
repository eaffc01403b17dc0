#include "mclab/partition.hpp"

namespace mclab {

PartitionEnumerator::PartitionEnumerator(std::uint32_t n) : n_(n) {
  if (n_ > 0) parts_.assign(1, n_);
}

void PartitionEnumerator::advance() {
  // Reverse-lex successor: decrement the rightmost part > 1 and repack that
  // part plus all trailing 1s greedily with the decremented value.
  std::size_t i = parts_.size();
  while (i > 0 && parts_[i - 1] == 1) --i;
  if (i == 0) {
    done_ = true;
    return;
  }
  --i;
  const std::uint32_t v = parts_[i] - 1;
  std::uint32_t rem =
      parts_[i] + static_cast<std::uint32_t>(parts_.size() - 1 - i);
  parts_.resize(i);
  while (rem >= v) {
    parts_.push_back(v);
    rem -= v;
  }
  if (rem > 0) parts_.push_back(rem);
}

bool PartitionEnumerator::next(Partition& out) {
  if (done_) return false;
  if (first_) {
    first_ = false;
  } else {
    if (n_ == 0) {
      done_ = true;
      return false;
    }
    advance();
    if (done_) return false;
  }
  out.parts = parts_;
  return true;
}

std::uint64_t count_partitions(std::uint32_t n) {
  std::uint64_t c = 0;
  for_each_partition(n, [&](const Partition&) { ++c; });
  return c;
}

}  // namespace mclab
