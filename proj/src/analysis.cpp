#include "hcsim/analysis.hpp"

#include <bit>
#include <unordered_map>
#include <vector>

namespace hcsim {

namespace {

// Fenwick tree over access positions; a set bit marks the most recent
// occurrence of some line, so a range sum counts distinct lines.
class BitIndexedTree {
 public:
  explicit BitIndexedTree(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t pos, int delta) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) {
      tree_[i] += delta;
    }
  }

  // Sum of marks at positions <= pos.
  std::int64_t prefix(std::size_t pos) const {
    std::int64_t sum = 0;
    for (std::size_t i = pos + 1; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::int64_t> tree_;
};

}  // namespace

std::uint64_t ReuseHistogram::total() const { return finite_total() + infinite; }

std::uint64_t ReuseHistogram::finite_total() const {
  std::uint64_t sum = 0;
  for (const auto& [_, count] : finite) sum += count;
  return sum;
}

ReuseHistogram reuse_distances(std::span<const TraceRecord> trace, unsigned line_bytes) {
  if (line_bytes == 0 || !std::has_single_bit(std::uint64_t{line_bytes})) {
    throw ConfigError("reuse_distances: line_bytes must be a power of two");
  }
  ReuseHistogram hist;
  hist.line_bytes = line_bytes;

  BitIndexedTree marks(trace.size());
  std::unordered_map<std::uint64_t, std::size_t> last_seen;
  last_seen.reserve(trace.size());
  unsigned shift = static_cast<unsigned>(std::countr_zero(std::uint64_t{line_bytes}));

  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::uint64_t line = trace[i].address >> shift;
    auto it = last_seen.find(line);
    if (it == last_seen.end()) {
      ++hist.infinite;
    } else {
      std::size_t prev = it->second;  // prev < i, so i >= 1
      std::uint64_t distance =
          static_cast<std::uint64_t>(marks.prefix(i - 1) - marks.prefix(prev));
      ++hist.finite[distance];
      marks.add(prev, -1);
    }
    marks.add(i, +1);
    last_seen[line] = i;
  }
  return hist;
}

std::string_view to_string(WorkloadClass cls) {
  switch (cls) {
    case WorkloadClass::CacheFriendly: return "CacheFriendly";
    case WorkloadClass::CacheSensitive: return "CacheSensitive";
    case WorkloadClass::Streaming: return "Streaming";
    case WorkloadClass::LargeWorkingSet: return "LargeWorkingSet";
  }
  return "?";
}

WorkloadClass classify(const ReuseHistogram& hist, std::uint64_t llc_lines,
                       const ClassifyThresholds& thresholds) {
  std::uint64_t total = hist.total();
  if (total == 0) throw ConfigError("classify: empty histogram");
  std::uint64_t finite = hist.finite_total();

  double finite_fraction = static_cast<double>(finite) / static_cast<double>(total);
  if (finite_fraction < thresholds.streaming_max_finite_fraction) {
    return WorkloadClass::Streaming;
  }

  double friendly_bound =
      static_cast<double>(llc_lines) / thresholds.friendly_distance_divisor;
  std::uint64_t below_friendly = 0;
  std::uint64_t at_least_llc = 0;
  for (const auto& [distance, count] : hist.finite) {
    if (static_cast<double>(distance) < friendly_bound) below_friendly += count;
    if (distance >= llc_lines) at_least_llc += count;
  }
  double finite_d = static_cast<double>(finite);
  if (finite > 0 && static_cast<double>(below_friendly) / finite_d >= thresholds.friendly_min_fraction) {
    return WorkloadClass::CacheFriendly;
  }
  if (finite > 0 && static_cast<double>(at_least_llc) / finite_d >= thresholds.large_min_fraction) {
    return WorkloadClass::LargeWorkingSet;
  }
  return WorkloadClass::CacheSensitive;
}

unsigned ceil_log2(std::uint64_t n) {
  if (n == 0) throw std::logic_error("ceil_log2(0)");
  return static_cast<unsigned>(std::bit_width(n - 1));
}

AreaBreakdown conventional_area_bits(const CacheGeometry& geometry, unsigned address_bits) {
  geometry.validate();
  std::uint64_t sets = geometry.sets();
  std::uint64_t lines = sets * geometry.ways;
  unsigned tag_width = address_bits - ceil_log2(sets) - ceil_log2(geometry.line_bytes);

  AreaBreakdown area;
  area.data_bits = lines * 8 * geometry.line_bytes;
  area.tag_bits = lines * tag_width;
  area.state_bits = lines * 2;  // valid + dirty
  area.replacement_bits = sets * geometry.ways * ceil_log2(geometry.ways);
  return area;
}

AreaBreakdown reuse_area_bits(const ReuseGeometry& geometry, unsigned address_bits) {
  geometry.validate();
  std::uint64_t tag_entries = geometry.sets * geometry.tag_ways;
  std::uint64_t data_entries = geometry.sets * geometry.data_ways;
  unsigned tag_width =
      address_bits - ceil_log2(geometry.sets) - ceil_log2(geometry.line_bytes);
  unsigned fwd_width = 1 + ceil_log2(geometry.data_ways);  // valid bit + data-way index
  unsigned rev_width = ceil_log2(geometry.tag_ways);
  unsigned counter_width = ceil_log2(std::uint64_t{geometry.hysteresis} + 1);

  AreaBreakdown area;
  area.tag_bits = tag_entries * tag_width;
  area.pointer_bits = tag_entries * fwd_width + data_entries * rev_width;
  area.state_bits = tag_entries * (1 + counter_width)  // valid + reuse counter
                    + data_entries * 2;                // valid + dirty
  area.data_bits = data_entries * 8 * geometry.line_bytes;
  area.replacement_bits = tag_entries * ceil_log2(geometry.tag_ways) +
                          data_entries * ceil_log2(geometry.data_ways);
  return area;
}

}  // namespace hcsim
