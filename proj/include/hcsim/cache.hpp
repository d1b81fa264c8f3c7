#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hcsim/replacement.hpp"
#include "hcsim/types.hpp"

namespace hcsim {

struct CacheGeometry {
  std::uint64_t size_bytes = 0;
  unsigned ways = 0;
  unsigned line_bytes = 0;

  std::uint64_t sets() const { return size_bytes / (std::uint64_t{ways} * line_bytes); }
  /// Throws ConfigError unless sets and line_bytes are powers of two and
  /// size_bytes = sets * ways * line_bytes, with 1 <= ways <= 64.
  void validate() const;
};

enum class WriteMode : std::uint8_t { Writeback, Writethrough };

std::string_view to_string(WriteMode mode);
std::optional<WriteMode> parse_write_mode(std::string_view token);

struct Eviction {
  std::uint64_t address = 0;  // line base address
  bool dirty = false;
  bool operator==(const Eviction&) const = default;
};

struct AccessOutcome {
  bool hit = false;
  bool filled = false;          // a new line was installed
  bool wrote_through = false;   // writethrough mode: the write propagates downstream
  std::optional<Eviction> evicted;
};

/// Conventional set-associative cache, metadata only (no data payloads).
/// Lookups probe every way; allocation honors the way mask. On a miss an
/// invalid way inside the mask (lowest index) is filled before the
/// replacement policy picks a victim.
class Cache {
 public:
  Cache(const CacheGeometry& geometry, PolicyKind policy, WriteMode write_mode);

  AccessOutcome access(std::uint64_t address, Op op);
  AccessOutcome access(std::uint64_t address, Op op, const WayMask& mask);

  /// Removes the line if present and returns its dirty flag.
  std::optional<bool> invalidate(std::uint64_t address);

  /// Probe without disturbing replacement state.
  bool contains(std::uint64_t address) const;

  const CacheGeometry& geometry() const { return geometry_; }
  WriteMode write_mode() const { return write_mode_; }
  std::uint64_t resident_lines() const;

 private:
  struct Line {
    bool valid = false;
    bool dirty = false;
    std::uint64_t tag = 0;
  };

  std::uint64_t set_index(std::uint64_t address) const;
  std::uint64_t tag_of(std::uint64_t address) const;
  std::uint64_t line_address(std::uint64_t tag, std::uint64_t set) const;
  int find_way(std::uint64_t set, std::uint64_t tag) const;
  void check_no_duplicates(std::uint64_t set) const;

  CacheGeometry geometry_;
  WriteMode write_mode_;
  unsigned line_shift_;
  unsigned set_shift_;
  std::vector<std::vector<Line>> sets_;
  std::vector<ReplacementState> repl_;
};

}  // namespace hcsim
