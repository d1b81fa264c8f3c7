#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "hcsim/cache.hpp"
#include "hcsim/reuse_cache.hpp"
#include "hcsim/types.hpp"

namespace hcsim {

/// Reuse-distance (LRU stack distance) histogram: distance = number of
/// distinct lines touched since the previous access to the same line;
/// first touches land in the infinite bucket.
struct ReuseHistogram {
  std::map<std::uint64_t, std::uint64_t> finite;
  std::uint64_t infinite = 0;
  unsigned line_bytes = 64;

  std::uint64_t total() const;
  std::uint64_t finite_total() const;
};

ReuseHistogram reuse_distances(std::span<const TraceRecord> trace, unsigned line_bytes);

enum class WorkloadClass : std::uint8_t {
  CacheFriendly,
  CacheSensitive,
  Streaming,
  LargeWorkingSet,
};

std::string_view to_string(WorkloadClass cls);

struct ClassifyThresholds {
  double streaming_max_finite_fraction = 0.05;  // below this: Streaming
  double friendly_min_fraction = 0.80;          // of finite distances < llc_lines/divisor
  double friendly_distance_divisor = 4.0;
  double large_min_fraction = 0.50;  // of finite distances >= llc_lines
};

WorkloadClass classify(const ReuseHistogram& hist, std::uint64_t llc_lines,
                       const ClassifyThresholds& thresholds = {});

/// Storage-bit area model. mm2 is out of scope; this counts SRAM bits.
struct AreaBreakdown {
  std::uint64_t data_bits = 0;
  std::uint64_t tag_bits = 0;
  std::uint64_t pointer_bits = 0;
  std::uint64_t state_bits = 0;        // valid/dirty/reuse-counter bits
  std::uint64_t replacement_bits = 0;  // LRU: ways * ceil(log2 ways) per set

  std::uint64_t total() const {
    return data_bits + tag_bits + pointer_bits + state_bits + replacement_bits;
  }
};

/// Per line: 8*line_bytes data, address_bits - log2(sets) - log2(line_bytes)
/// tag, 2 state bits, ceil(log2 ways) replacement bits.
AreaBreakdown conventional_area_bits(const CacheGeometry& geometry, unsigned address_bits = kAddressBits);

/// Tag entry: tag + valid + (1 + ceil(log2 data_ways)) forward pointer +
/// ceil(log2(hysteresis+1)) counter + replacement share. Data entry:
/// 8*line_bytes + 2 state bits + ceil(log2 tag_ways) reverse pointer +
/// replacement share.
AreaBreakdown reuse_area_bits(const ReuseGeometry& geometry, unsigned address_bits = kAddressBits);

unsigned ceil_log2(std::uint64_t n);

}  // namespace hcsim
