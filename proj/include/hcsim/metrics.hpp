#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hcsim/types.hpp"

namespace hcsim {

enum class Level : std::uint8_t { L1, L2, Llc, Dram };

std::string_view to_string(Level level);

struct LevelCounters {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  bool operator==(const LevelCounters&) const = default;
};

/// Raw and derived per-requester counters. L1/L2 counters are demand
/// lookups; writeback and writethrough arrivals are tracked separately.
/// LLC counters include writeback arrivals so that
/// llc.accesses = l2.misses + l2_writebacks under non-bypass schemes.
struct SourceMetrics {
  std::uint64_t instructions = 0;
  LevelCounters l1i, l1d, l2, llc;
  std::uint64_t l1_writebacks = 0;       // dirty L1 victims handed to L2
  std::uint64_t l1_through_writes = 0;   // writethrough L1 writes handed to L2
  std::uint64_t l2_writebacks = 0;       // dirty L2 victims handed down
  double cycles = 0.0;
  double mpki = 0.0;  // LLC misses per kilo-instruction
  double ipc = 0.0;

  bool operator==(const SourceMetrics&) const = default;
};

struct DramTraffic {
  std::uint64_t llc_fills = 0;             // demand fills into the LLC
  std::uint64_t llc_writebacks = 0;        // dirty LLC/data-array victims
  std::uint64_t bypass_transfers = 0;      // GPU traffic routed around the LLC
  std::uint64_t writethrough_transfers = 0;  // reuse-cache writes sent straight to memory

  std::uint64_t line_transfers() const {
    return llc_fills + llc_writebacks + bypass_transfers + writethrough_transfers;
  }
  bool operator==(const DramTraffic&) const = default;
};

struct ReuseLlcStats {
  std::uint64_t data_allocations = 0;
  std::uint64_t tag_evictions = 0;
  std::uint64_t data_evictions = 0;
  bool operator==(const ReuseLlcStats&) const = default;
};

struct MetricsReport {
  std::string scheme;
  std::string trace_label;
  std::map<Source, SourceMetrics> sources;
  DramTraffic dram;
  ReuseLlcStats reuse;  // all zero under conventional schemes
  std::uint64_t total_instructions = 0;
  double total_cycles = 0.0;  // max over per-source cycles
  double bus_utilization = 0.0;
  double ipc_sum = 0.0;  // sum of per-source IPCs
  unsigned line_bytes = 64;
  std::uint64_t bus_bytes_per_cycle = 16;

  /// Counter identities: hits + misses = accesses at every level,
  /// l2 accesses = l1 misses, DRAM conservation, utilization in [0,1].
  /// Throws std::logic_error on violation.
  void validate() const;
};

/// misses * 1000 / instructions. Throws MetricError when instructions = 0.
double mpki(std::uint64_t misses, std::uint64_t instructions);

/// min(1, transfers * (line_bytes / bus_bytes_per_cycle) / total_cycles).
/// Throws MetricError when total_cycles = 0.
double bus_utilization(std::uint64_t dram_line_transfers, double total_cycles,
                       unsigned line_bytes, std::uint64_t bus_bytes_per_cycle);

/// instructions / cycles. Throws MetricError when cycles = 0.
double ipc_proxy(std::uint64_t instructions, double cycles);

}  // namespace hcsim
