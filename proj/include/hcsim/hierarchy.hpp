#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hcsim/cache.hpp"
#include "hcsim/metrics.hpp"
#include "hcsim/replacement.hpp"
#include "hcsim/reuse_cache.hpp"
#include "hcsim/types.hpp"

namespace hcsim {

enum class LlcScheme : std::uint8_t { SharedLru, StaticPartition, GpuBypass, ReuseCache };

std::string_view to_string(LlcScheme scheme);
std::optional<LlcScheme> parse_llc_scheme(std::string_view token);

struct CacheConfig {
  CacheGeometry geometry;
  PolicyKind policy = PolicyKind::TreePlru;
  WriteMode write_mode = WriteMode::Writeback;
};

struct LevelLatencies {
  std::uint64_t l1 = 1;
  std::uint64_t l2 = 10;
  std::uint64_t llc = 30;
  std::uint64_t dram = 200;
};

/// Full hierarchy parameterization. Defaults model the evaluated system:
/// two CPU cores with private 32KB 4-way L1I/L1D and 256KB 8-way L2 (all
/// PseudoLRU); four GPU CUs with private 4KB 4-way writethrough L1D, one
/// shared 32KB 8-way L1I per four CUs, and a unified 4KB 8-way writeback
/// L2; a shared 16-way 64B-line LRU LLC (1MB); 2GB DRAM.
struct HierarchyConfig {
  unsigned cpu_cores = 2;
  unsigned gpu_cus = 4;
  unsigned gpu_cus_per_l1i = 4;
  bool cpu_l2_shared = false;

  CacheConfig cpu_l1i, cpu_l1d, cpu_l2;
  CacheConfig gpu_l1d, gpu_l1i, gpu_l2;
  CacheConfig llc;

  LlcScheme llc_scheme = LlcScheme::SharedLru;
  unsigned partition_cpu_ways = 8;  // StaticPartition: ways [0, cpu) CPU, rest GPU
  ReuseGeometry reuse;              // ReuseCache scheme

  LevelLatencies latencies;
  std::uint64_t bus_bytes_per_cycle = 16;
  double cpi_base = 1.0;
  std::uint64_t dram_bytes = std::uint64_t{2} * 1024 * 1024 * 1024;

  HierarchyConfig();

  WayMask cpu_mask() const;
  WayMask gpu_mask() const;
  void validate() const;
};

/// Per-record routing result.
struct RoutedAccess {
  Source source;
  Level serviced_at = Level::L1;
  double latency_cycles = 0.0;       // demand path: serviced level plus all traversed levels
  std::uint64_t dram_line_transfers = 0;  // fills + writebacks + bypass/writethrough caused
};

/// Wires the configured hierarchy and routes records through it under the
/// selected LLC scheme. One instance per simulation run; strictly
/// sequential.
class Hierarchy {
 public:
  explicit Hierarchy(const HierarchyConfig& config);

  /// Routes one record. Throws ConfigError for a source with no configured
  /// path.
  RoutedAccess step(const TraceRecord& record);

  MetricsReport report() const;

  const HierarchyConfig& config() const { return config_; }
  /// Conventional-LLC introspection for tests; throws under ReuseCache.
  const Cache& llc_cache() const;
  const ReuseCache& reuse_llc() const;

 private:
  struct PathResult {
    Level serviced = Level::Dram;
    double latency = 0.0;
    std::uint64_t transfers = 0;
  };

  Cache& l1i_for(Source src);
  Cache& l1d_for(Source src);
  Cache& l2_for(Source src);
  SourceMetrics& metrics_for(Source src);

  PathResult fill_from_l2(Source src, std::uint64_t address);
  PathResult fill_from_llc(Source src, std::uint64_t address);
  std::uint64_t write_to_l2(Source src, std::uint64_t address);
  std::uint64_t write_to_llc(Source src, std::uint64_t address);
  WayMask llc_mask_for(Source src) const;

  HierarchyConfig config_;
  std::vector<Cache> cpu_l1i_, cpu_l1d_, cpu_l2_;
  std::vector<Cache> gpu_l1d_, gpu_l1i_;
  std::vector<Cache> gpu_l2_;
  std::optional<Cache> llc_;
  std::optional<ReuseCache> reuse_;
  std::map<Source, SourceMetrics> sources_;
  DramTraffic dram_;
  ReuseLlcStats reuse_stats_;
  std::uint64_t routed_transfers_ = 0;
};

/// Runs the whole trace and returns the aggregated report.
/// Throws ConfigError for an empty trace or invalid config.
MetricsReport simulate(std::span<const TraceRecord> trace, const HierarchyConfig& config,
                       std::string trace_label = {});

}  // namespace hcsim
