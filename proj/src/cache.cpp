#include "hcsim/cache.hpp"

#include <bit>
#include <cassert>

namespace hcsim {

void CacheGeometry::validate() const {
  if (line_bytes == 0 || !std::has_single_bit(static_cast<std::uint64_t>(line_bytes))) {
    throw ConfigError("cache geometry: line_bytes must be a power of two");
  }
  if (ways == 0 || ways > 64) throw ConfigError("cache geometry: ways must lie in 1..64");
  std::uint64_t line_capacity = std::uint64_t{ways} * line_bytes;
  if (size_bytes == 0 || size_bytes % line_capacity != 0) {
    throw ConfigError("cache geometry: size_bytes must equal sets * ways * line_bytes");
  }
  if (!std::has_single_bit(sets())) {
    throw ConfigError("cache geometry: set count must be a power of two");
  }
}

std::string_view to_string(WriteMode mode) {
  return mode == WriteMode::Writeback ? "Writeback" : "Writethrough";
}

std::optional<WriteMode> parse_write_mode(std::string_view token) {
  if (token == "Writeback") return WriteMode::Writeback;
  if (token == "Writethrough") return WriteMode::Writethrough;
  return std::nullopt;
}

Cache::Cache(const CacheGeometry& geometry, PolicyKind policy, WriteMode write_mode)
    : geometry_(geometry), write_mode_(write_mode) {
  geometry_.validate();
  line_shift_ = static_cast<unsigned>(std::countr_zero(std::uint64_t{geometry_.line_bytes}));
  set_shift_ = static_cast<unsigned>(std::countr_zero(geometry_.sets()));
  sets_.assign(geometry_.sets(), std::vector<Line>(geometry_.ways));
  repl_.reserve(geometry_.sets());
  for (std::uint64_t s = 0; s < geometry_.sets(); ++s) {
    repl_.emplace_back(policy, geometry_.ways);
  }
}

std::uint64_t Cache::set_index(std::uint64_t address) const {
  return (address >> line_shift_) & (geometry_.sets() - 1);
}

std::uint64_t Cache::tag_of(std::uint64_t address) const {
  return address >> (line_shift_ + set_shift_);
}

std::uint64_t Cache::line_address(std::uint64_t tag, std::uint64_t set) const {
  return ((tag << set_shift_) | set) << line_shift_;
}

int Cache::find_way(std::uint64_t set, std::uint64_t tag) const {
  const auto& lines = sets_[set];
  for (unsigned w = 0; w < lines.size(); ++w) {
    if (lines[w].valid && lines[w].tag == tag) return static_cast<int>(w);
  }
  return -1;
}

AccessOutcome Cache::access(std::uint64_t address, Op op) {
  return access(address, op, WayMask::full(geometry_.ways));
}

AccessOutcome Cache::access(std::uint64_t address, Op op, const WayMask& mask) {
  std::uint64_t set = set_index(address);
  std::uint64_t tag = tag_of(address);
  auto& lines = sets_[set];
  AccessOutcome out;

  int way = find_way(set, tag);  // hits probe every way, masked or not
  if (way >= 0) {
    out.hit = true;
    repl_[set].touch(static_cast<unsigned>(way));
    if (op == Op::Write) {
      if (write_mode_ == WriteMode::Writeback) {
        lines[way].dirty = true;
      } else {
        out.wrote_through = true;
      }
    }
#ifndef NDEBUG
    check_no_duplicates(set);
#endif
    return out;
  }

  // Miss: fill an invalid masked way if one exists, else evict the policy
  // victim within the mask.
  unsigned victim = geometry_.ways;
  for (unsigned w = 0; w < lines.size(); ++w) {
    if (mask.test(w) && !lines[w].valid) {
      victim = w;
      break;
    }
  }
  if (victim == geometry_.ways) victim = repl_[set].victim(mask);

  if (lines[victim].valid) {
    out.evicted = Eviction{line_address(lines[victim].tag, set), lines[victim].dirty};
  }
  lines[victim] = Line{true, false, tag};
  out.filled = true;
  repl_[set].touch(victim);
  if (op == Op::Write) {
    if (write_mode_ == WriteMode::Writeback) {
      lines[victim].dirty = true;
    } else {
      out.wrote_through = true;
    }
  }
#ifndef NDEBUG
  check_no_duplicates(set);
#endif
  return out;
}

std::optional<bool> Cache::invalidate(std::uint64_t address) {
  std::uint64_t set = set_index(address);
  int way = find_way(set, tag_of(address));
  if (way < 0) return std::nullopt;
  bool dirty = sets_[set][way].dirty;
  sets_[set][way] = Line{};
  return dirty;
}

bool Cache::contains(std::uint64_t address) const {
  return find_way(set_index(address), tag_of(address)) >= 0;
}

std::uint64_t Cache::resident_lines() const {
  std::uint64_t count = 0;
  for (const auto& set : sets_) {
    for (const auto& line : set) count += line.valid;
  }
  return count;
}

void Cache::check_no_duplicates(std::uint64_t set) const {
  const auto& lines = sets_[set];
  for (unsigned a = 0; a < lines.size(); ++a) {
    if (!lines[a].valid) {
      assert(!lines[a].dirty);
      continue;
    }
    for (unsigned b = a + 1; b < lines.size(); ++b) {
      assert(!(lines[b].valid && lines[b].tag == lines[a].tag));
    }
    if (write_mode_ == WriteMode::Writethrough) assert(!lines[a].dirty);
  }
}

}  // namespace hcsim
