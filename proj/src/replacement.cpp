#include "hcsim/replacement.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace hcsim {

WayMask WayMask::full(unsigned ways) {
  if (ways == 0 || ways > 64) throw ConfigError("way mask supports 1..64 ways");
  if (ways == 64) return WayMask(~std::uint64_t{0});
  return WayMask((std::uint64_t{1} << ways) - 1);
}

WayMask WayMask::range(unsigned first, unsigned count) {
  WayMask m;
  for (unsigned w = first; w < first + count; ++w) m.set(w);
  return m;
}

unsigned WayMask::count() const { return static_cast<unsigned>(std::popcount(bits_)); }

std::string_view to_string(PolicyKind kind) {
  return kind == PolicyKind::Lru ? "LRU" : "TreePLRU";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view token) {
  if (token == "LRU") return PolicyKind::Lru;
  if (token == "TreePLRU" || token == "PseudoLRU") return PolicyKind::TreePlru;
  return std::nullopt;
}

ReplacementState::ReplacementState(PolicyKind kind, unsigned ways) : kind_(kind), ways_(ways) {
  if (ways == 0 || ways > 64) throw ConfigError("replacement state supports 1..64 ways");
  if (kind == PolicyKind::Lru) {
    recency_.resize(ways);
    std::iota(recency_.begin(), recency_.end(), std::uint8_t{0});
  } else {
    if (!std::has_single_bit(ways)) {
      throw ConfigError("TreePLRU requires a power-of-two way count");
    }
    last_touch_.assign(ways, 0);
  }
}

void ReplacementState::touch(unsigned way) {
  if (way >= ways_) throw std::logic_error("replacement touch: way out of range");
  if (kind_ == PolicyKind::Lru) {
    auto it = std::find(recency_.begin(), recency_.end(), static_cast<std::uint8_t>(way));
    recency_.erase(it);
    recency_.push_back(static_cast<std::uint8_t>(way));
    return;
  }
  // Walk root to leaf, pointing every node away from `way`.
  unsigned node = 1;
  unsigned span = ways_;
  unsigned base = 0;
  while (span > 1) {
    unsigned half = span / 2;
    bool in_right = way >= base + half;
    if (in_right) {
      bits_ &= ~(std::uint64_t{1} << (node - 1));  // victim path goes left
      base += half;
      node = 2 * node + 1;
    } else {
      bits_ |= std::uint64_t{1} << (node - 1);  // victim path goes right
      node = 2 * node;
    }
    span = half;
  }
  last_touch_[way] = ++tick_;
}

unsigned ReplacementState::victim(const WayMask& mask) const {
  if (mask.empty()) throw std::logic_error("replacement victim: empty way mask");
  if (kind_ == PolicyKind::Lru) {
    for (std::uint8_t way : recency_) {
      if (mask.test(way)) return way;
    }
    throw std::logic_error("replacement victim: mask selects no way");
  }
  if (mask == WayMask::full(ways_)) {
    unsigned node = 1;
    unsigned span = ways_;
    unsigned base = 0;
    while (span > 1) {
      unsigned half = span / 2;
      bool right = (bits_ >> (node - 1)) & 1u;
      if (right) {
        base += half;
        node = 2 * node + 1;
      } else {
        node = 2 * node;
      }
      span = half;
    }
    return base;
  }
  // Tree bits do not compose with partial masks; fall back to the
  // least-recently-touched allowed way.
  unsigned best = ways_;
  for (unsigned way = 0; way < ways_; ++way) {
    if (!mask.test(way)) continue;
    if (best == ways_ || last_touch_[way] < last_touch_[best]) best = way;
  }
  if (best == ways_) throw std::logic_error("replacement victim: mask selects no way");
  return best;
}

const std::vector<std::uint8_t>& ReplacementState::recency_order() const {
  if (kind_ != PolicyKind::Lru) throw std::logic_error("recency order is LRU-only");
  return recency_;
}

std::uint64_t ReplacementState::tree_bits() const {
  if (kind_ != PolicyKind::TreePlru) throw std::logic_error("tree bits are TreePLRU-only");
  return bits_;
}

ReplacementState ReplacementState::from_tree_bits(unsigned ways, std::uint64_t bits) {
  ReplacementState state(PolicyKind::TreePlru, ways);
  if (bits >> (ways - 1) != 0) {
    throw std::logic_error("tree state exceeds ways-1 bits");
  }
  state.bits_ = bits;
  return state;
}

}  // namespace hcsim
