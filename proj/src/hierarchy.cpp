#include "hcsim/hierarchy.hpp"

#include <cassert>
#include <utility>

namespace hcsim {

std::string_view to_string(LlcScheme scheme) {
  switch (scheme) {
    case LlcScheme::SharedLru: return "SharedLRU";
    case LlcScheme::StaticPartition: return "StaticPartition";
    case LlcScheme::GpuBypass: return "GpuBypass";
    case LlcScheme::ReuseCache: return "ReuseCache";
  }
  return "?";
}

std::optional<LlcScheme> parse_llc_scheme(std::string_view token) {
  if (token == "SharedLRU") return LlcScheme::SharedLru;
  if (token == "StaticPartition") return LlcScheme::StaticPartition;
  if (token == "GpuBypass") return LlcScheme::GpuBypass;
  if (token == "ReuseCache") return LlcScheme::ReuseCache;
  return std::nullopt;
}

HierarchyConfig::HierarchyConfig() {
  cpu_l1i = {{32 * 1024, 4, 64}, PolicyKind::TreePlru, WriteMode::Writeback};
  cpu_l1d = cpu_l1i;
  cpu_l2 = {{256 * 1024, 8, 64}, PolicyKind::TreePlru, WriteMode::Writeback};
  gpu_l1d = {{4 * 1024, 4, 64}, PolicyKind::TreePlru, WriteMode::Writethrough};
  gpu_l1i = {{32 * 1024, 8, 64}, PolicyKind::TreePlru, WriteMode::Writeback};
  gpu_l2 = {{4 * 1024, 8, 64}, PolicyKind::TreePlru, WriteMode::Writeback};
  llc = {{1024 * 1024, 16, 64}, PolicyKind::Lru, WriteMode::Writeback};
}

WayMask HierarchyConfig::cpu_mask() const { return WayMask::range(0, partition_cpu_ways); }

WayMask HierarchyConfig::gpu_mask() const {
  return WayMask::range(partition_cpu_ways, llc.geometry.ways - partition_cpu_ways);
}

void HierarchyConfig::validate() const {
  if (cpu_cores == 0 && gpu_cus == 0) throw ConfigError("config: no requesters configured");
  if (cpu_cores > 64 || gpu_cus > 64) throw ConfigError("config: at most 64 cores/CUs");
  if (gpu_cus_per_l1i == 0) throw ConfigError("config: gpu_cus_per_l1i must be >= 1");
  cpu_l1i.geometry.validate();
  cpu_l1d.geometry.validate();
  cpu_l2.geometry.validate();
  gpu_l1d.geometry.validate();
  gpu_l1i.geometry.validate();
  gpu_l2.geometry.validate();
  llc.geometry.validate();

  unsigned line = llc.geometry.line_bytes;
  for (const CacheConfig* level : {&cpu_l1i, &cpu_l1d, &cpu_l2, &gpu_l1d, &gpu_l1i, &gpu_l2}) {
    if (level->geometry.line_bytes != line) {
      throw ConfigError("config: all cache levels must share one line size");
    }
  }

  if (llc_scheme == LlcScheme::StaticPartition) {
    if (partition_cpu_ways == 0 || partition_cpu_ways >= llc.geometry.ways) {
      throw ConfigError("config: partition must leave both CPU and GPU at least one way");
    }
  }
  if (llc_scheme == LlcScheme::ReuseCache) {
    reuse.validate();
    if (reuse.line_bytes != line) {
      throw ConfigError("config: reuse cache line size must match the hierarchy");
    }
  }
  if (bus_bytes_per_cycle == 0) throw ConfigError("config: bus_bytes_per_cycle must be >= 1");
  if (cpi_base <= 0.0) throw ConfigError("config: cpi_base must be positive");
}

Hierarchy::Hierarchy(const HierarchyConfig& config) : config_(config) {
  config_.validate();
  for (unsigned i = 0; i < config_.cpu_cores; ++i) {
    cpu_l1i_.emplace_back(config_.cpu_l1i.geometry, config_.cpu_l1i.policy,
                          config_.cpu_l1i.write_mode);
    cpu_l1d_.emplace_back(config_.cpu_l1d.geometry, config_.cpu_l1d.policy,
                          config_.cpu_l1d.write_mode);
  }
  unsigned l2_count = config_.cpu_l2_shared ? 1 : config_.cpu_cores;
  for (unsigned i = 0; i < l2_count && config_.cpu_cores > 0; ++i) {
    cpu_l2_.emplace_back(config_.cpu_l2.geometry, config_.cpu_l2.policy,
                         config_.cpu_l2.write_mode);
  }
  for (unsigned i = 0; i < config_.gpu_cus; ++i) {
    gpu_l1d_.emplace_back(config_.gpu_l1d.geometry, config_.gpu_l1d.policy,
                          config_.gpu_l1d.write_mode);
  }
  unsigned icaches = (config_.gpu_cus + config_.gpu_cus_per_l1i - 1) / config_.gpu_cus_per_l1i;
  for (unsigned i = 0; i < icaches; ++i) {
    gpu_l1i_.emplace_back(config_.gpu_l1i.geometry, config_.gpu_l1i.policy,
                          config_.gpu_l1i.write_mode);
  }
  if (config_.gpu_cus > 0) {
    gpu_l2_.emplace_back(config_.gpu_l2.geometry, config_.gpu_l2.policy,
                         config_.gpu_l2.write_mode);
  }
  if (config_.llc_scheme == LlcScheme::ReuseCache) {
    reuse_.emplace(config_.reuse);
  } else {
    llc_.emplace(config_.llc.geometry, config_.llc.policy, config_.llc.write_mode);
  }
}

const Cache& Hierarchy::llc_cache() const {
  if (!llc_) throw std::logic_error("hierarchy runs a reuse LLC");
  return *llc_;
}

const ReuseCache& Hierarchy::reuse_llc() const {
  if (!reuse_) throw std::logic_error("hierarchy runs a conventional LLC");
  return *reuse_;
}

Cache& Hierarchy::l1i_for(Source src) {
  if (src.is_cpu()) return cpu_l1i_[src.index];
  return gpu_l1i_[src.index / config_.gpu_cus_per_l1i];
}

Cache& Hierarchy::l1d_for(Source src) {
  return src.is_cpu() ? cpu_l1d_[src.index] : gpu_l1d_[src.index];
}

Cache& Hierarchy::l2_for(Source src) {
  if (src.is_cpu()) return cpu_l2_[config_.cpu_l2_shared ? 0 : src.index];
  return gpu_l2_[0];
}

SourceMetrics& Hierarchy::metrics_for(Source src) { return sources_[src]; }

WayMask Hierarchy::llc_mask_for(Source src) const {
  if (config_.llc_scheme == LlcScheme::StaticPartition) {
    return src.is_cpu() ? config_.cpu_mask() : config_.gpu_mask();
  }
  return WayMask::full(config_.llc.geometry.ways);
}

RoutedAccess Hierarchy::step(const TraceRecord& record) {
  Source src = record.source;
  if (src.is_cpu() ? src.index >= config_.cpu_cores : src.index >= config_.gpu_cus) {
    throw ConfigError("trace source " + src.name() + " has no configured path");
  }

  SourceMetrics& m = metrics_for(src);
  m.instructions += record.icount;

  Cache& l1 = (record.op == Op::IFetch) ? l1i_for(src) : l1d_for(src);
  LevelCounters& l1c = (record.op == Op::IFetch) ? m.l1i : m.l1d;
  AccessOutcome out = l1.access(record.address, record.op);
  ++l1c.accesses;
  out.hit ? ++l1c.hits : ++l1c.misses;

  RoutedAccess routed;
  routed.source = src;
  if (out.hit) {
    routed.serviced_at = Level::L1;
    routed.latency_cycles = static_cast<double>(config_.latencies.l1);
  } else {
    PathResult fill = fill_from_l2(src, record.address);
    routed.serviced_at = fill.serviced;
    routed.latency_cycles = static_cast<double>(config_.latencies.l1) + fill.latency;
    routed.dram_line_transfers += fill.transfers;
  }

  // Off the demand path: writethrough propagation, then the victim's
  // writeback.
  if (out.wrote_through) {
    ++m.l1_through_writes;
    routed.dram_line_transfers += write_to_l2(src, record.address);
  }
  if (out.evicted && out.evicted->dirty) {
    ++m.l1_writebacks;
    routed.dram_line_transfers += write_to_l2(src, out.evicted->address);
  }

  m.cycles += static_cast<double>(record.icount) * config_.cpi_base + routed.latency_cycles;
  routed_transfers_ += routed.dram_line_transfers;
  return routed;
}

Hierarchy::PathResult Hierarchy::fill_from_l2(Source src, std::uint64_t address) {
  SourceMetrics& m = metrics_for(src);
  Cache& l2 = l2_for(src);
  AccessOutcome out = l2.access(address, Op::Read);
  ++m.l2.accesses;
  out.hit ? ++m.l2.hits : ++m.l2.misses;

  PathResult result;
  if (out.hit) {
    result = {Level::L2, static_cast<double>(config_.latencies.l2), 0};
  } else {
    PathResult deeper = fill_from_llc(src, address);
    result = {deeper.serviced, static_cast<double>(config_.latencies.l2) + deeper.latency,
              deeper.transfers};
  }
  if (out.evicted && out.evicted->dirty) {
    ++m.l2_writebacks;
    result.transfers += write_to_llc(src, out.evicted->address);
  }
  return result;
}

Hierarchy::PathResult Hierarchy::fill_from_llc(Source src, std::uint64_t address) {
  SourceMetrics& m = metrics_for(src);
  double llc_lat = static_cast<double>(config_.latencies.llc);
  double dram_lat = static_cast<double>(config_.latencies.dram);

  if (config_.llc_scheme == LlcScheme::GpuBypass && src.is_gpu()) {
    ++dram_.bypass_transfers;
    return {Level::Dram, dram_lat, 1};
  }

  if (reuse_) {
    ReuseOutcome out = reuse_->access(address, Op::Read);
    ++m.llc.accesses;
    out.data_hit ? ++m.llc.hits : ++m.llc.misses;
    reuse_stats_.data_allocations += out.data_allocated;
    reuse_stats_.tag_evictions += out.tag_evicted.has_value();
    reuse_stats_.data_evictions += out.data_evicted.has_value();
    if (out.data_hit) return {Level::Llc, llc_lat, 0};
    std::uint64_t transfers = 0;
    if (out.dram_fetch) {
      ++dram_.llc_fills;
      ++transfers;
    }
    if (out.dram_writeback) {
      ++dram_.llc_writebacks;
      ++transfers;
    }
    assert(!out.wrote_through);
    return {Level::Dram, llc_lat + dram_lat, transfers};
  }

  AccessOutcome out = llc_->access(address, Op::Read, llc_mask_for(src));
  ++m.llc.accesses;
  out.hit ? ++m.llc.hits : ++m.llc.misses;
  if (out.hit) return {Level::Llc, llc_lat, 0};

  std::uint64_t transfers = 1;  // demand fill
  ++dram_.llc_fills;
  if (out.evicted && out.evicted->dirty) {
    ++dram_.llc_writebacks;
    ++transfers;
  }
  return {Level::Dram, llc_lat + dram_lat, transfers};
}

std::uint64_t Hierarchy::write_to_l2(Source src, std::uint64_t address) {
  SourceMetrics& m = metrics_for(src);
  Cache& l2 = l2_for(src);
  AccessOutcome out = l2.access(address, Op::Write);
  std::uint64_t transfers = 0;
  if (out.wrote_through) transfers += write_to_llc(src, address);
  if (out.evicted && out.evicted->dirty) {
    ++m.l2_writebacks;
    transfers += write_to_llc(src, out.evicted->address);
  }
  return transfers;
}

std::uint64_t Hierarchy::write_to_llc(Source src, std::uint64_t address) {
  SourceMetrics& m = metrics_for(src);

  if (config_.llc_scheme == LlcScheme::GpuBypass && src.is_gpu()) {
    ++dram_.bypass_transfers;
    return 1;
  }

  if (reuse_) {
    ReuseOutcome out = reuse_->access(address, Op::Write);
    ++m.llc.accesses;
    out.data_hit ? ++m.llc.hits : ++m.llc.misses;
    reuse_stats_.data_allocations += out.data_allocated;
    reuse_stats_.tag_evictions += out.tag_evicted.has_value();
    reuse_stats_.data_evictions += out.data_evicted.has_value();
    std::uint64_t transfers = 0;
    if (out.dram_writeback) {
      ++dram_.llc_writebacks;
      ++transfers;
    }
    if (out.wrote_through) {
      ++dram_.writethrough_transfers;
      ++transfers;
    }
    assert(!out.dram_fetch);
    return transfers;
  }

  AccessOutcome out = llc_->access(address, Op::Write, llc_mask_for(src));
  ++m.llc.accesses;
  out.hit ? ++m.llc.hits : ++m.llc.misses;
  if (out.evicted && out.evicted->dirty) {
    ++dram_.llc_writebacks;
    return 1;
  }
  return 0;
}

MetricsReport Hierarchy::report() const {
  MetricsReport report;
  report.scheme = std::string(to_string(config_.llc_scheme));
  report.sources = sources_;
  report.dram = dram_;
  report.reuse = reuse_stats_;
  report.line_bytes = config_.llc.geometry.line_bytes;
  report.bus_bytes_per_cycle = config_.bus_bytes_per_cycle;

  for (auto& [src, m] : report.sources) {
    report.total_instructions += m.instructions;
    report.total_cycles = std::max(report.total_cycles, m.cycles);
    m.mpki = mpki(m.llc.misses, m.instructions);
    m.ipc = ipc_proxy(m.instructions, m.cycles);
    report.ipc_sum += m.ipc;
  }
  if (report.total_cycles > 0.0) {
    report.bus_utilization = bus_utilization(dram_.line_transfers(), report.total_cycles,
                                             report.line_bytes, report.bus_bytes_per_cycle);
  }
  assert(routed_transfers_ == dram_.line_transfers());
  report.validate();
  return report;
}

MetricsReport simulate(std::span<const TraceRecord> trace, const HierarchyConfig& config,
                       std::string trace_label) {
  if (trace.empty()) throw ConfigError("simulate: empty trace");
  Hierarchy hierarchy(config);
  for (const TraceRecord& record : trace) hierarchy.step(record);
  MetricsReport report = hierarchy.report();
  report.trace_label = std::move(trace_label);
  return report;
}

}  // namespace hcsim
