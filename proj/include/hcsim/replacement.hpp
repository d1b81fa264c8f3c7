#pragma once

#include <cstdint>
#include <vector>

#include "hcsim/types.hpp"

namespace hcsim {

/// Subset of ways eligible for victim selection. Lookups (hits) are never
/// masked; only allocation is.
class WayMask {
 public:
  constexpr WayMask() = default;
  explicit constexpr WayMask(std::uint64_t bits) : bits_(bits) {}

  static WayMask full(unsigned ways);
  /// Ways [first, first + count).
  static WayMask range(unsigned first, unsigned count);

  bool test(unsigned way) const { return (bits_ >> way) & 1u; }
  WayMask& set(unsigned way) {
    bits_ |= std::uint64_t{1} << way;
    return *this;
  }
  unsigned count() const;
  bool empty() const { return bits_ == 0; }
  std::uint64_t bits() const { return bits_; }

  bool operator==(const WayMask&) const = default;
};

enum class PolicyKind : std::uint8_t { Lru, TreePlru };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view token);

/// Per-set replacement state. LRU keeps an explicit recency order; TreePlru
/// keeps ways-1 tree bits plus per-way timestamps used only when a partial
/// mask forces victim selection the tree bits cannot express.
class ReplacementState {
 public:
  ReplacementState(PolicyKind kind, unsigned ways);

  void touch(unsigned way);
  unsigned victim(const WayMask& mask) const;

  unsigned ways() const { return ways_; }
  PolicyKind kind() const { return kind_; }

  /// LRU only: way indices from least- to most-recently used.
  const std::vector<std::uint8_t>& recency_order() const;

  /// TreePlru only: the packed tree, exactly ways-1 bits.
  std::uint64_t tree_bits() const;
  static ReplacementState from_tree_bits(unsigned ways, std::uint64_t bits);

 private:
  PolicyKind kind_;
  unsigned ways_;
  std::vector<std::uint8_t> recency_;    // Lru: front = least recent
  std::uint64_t bits_ = 0;               // TreePlru: heap-ordered internal nodes
  std::vector<std::uint64_t> last_touch_;  // TreePlru: masked-victim fallback
  std::uint64_t tick_ = 0;
};

}  // namespace hcsim
