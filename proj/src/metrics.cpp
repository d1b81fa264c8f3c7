#include "hcsim/metrics.hpp"

#include <algorithm>

namespace hcsim {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::Llc: return "LLC";
    case Level::Dram: return "DRAM";
  }
  return "?";
}

double mpki(std::uint64_t misses, std::uint64_t instructions) {
  if (instructions == 0) throw MetricError("mpki: zero instruction count");
  return static_cast<double>(misses) * 1000.0 / static_cast<double>(instructions);
}

double bus_utilization(std::uint64_t dram_line_transfers, double total_cycles,
                       unsigned line_bytes, std::uint64_t bus_bytes_per_cycle) {
  if (total_cycles <= 0.0) throw MetricError("bus_utilization: zero cycle count");
  double cycles_per_line =
      static_cast<double>(line_bytes) / static_cast<double>(bus_bytes_per_cycle);
  double busy = static_cast<double>(dram_line_transfers) * cycles_per_line;
  return std::min(1.0, busy / total_cycles);
}

double ipc_proxy(std::uint64_t instructions, double cycles) {
  if (cycles <= 0.0) throw MetricError("ipc_proxy: zero cycle count");
  return static_cast<double>(instructions) / cycles;
}

namespace {

void check_level(const LevelCounters& c, const char* what) {
  if (c.hits + c.misses != c.accesses) {
    throw std::logic_error(std::string("metrics: hits + misses != accesses at ") + what);
  }
}

}  // namespace

void MetricsReport::validate() const {
  for (const auto& [source, m] : sources) {
    check_level(m.l1i, "L1I");
    check_level(m.l1d, "L1D");
    check_level(m.l2, "L2");
    check_level(m.llc, "LLC");
    if (m.l2.accesses != m.l1i.misses + m.l1d.misses) {
      throw std::logic_error("metrics: L2 accesses != L1 misses for " + source.name());
    }
  }
  if (dram.line_transfers() !=
      dram.llc_fills + dram.llc_writebacks + dram.bypass_transfers + dram.writethrough_transfers) {
    throw std::logic_error("metrics: DRAM transfer conservation violated");
  }
  if (bus_utilization < 0.0 || bus_utilization > 1.0) {
    throw std::logic_error("metrics: bus utilization outside [0,1]");
  }
}

}  // namespace hcsim
