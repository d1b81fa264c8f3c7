#include "hcsim/reuse_cache.hpp"

#include <bit>
#include <cassert>

namespace hcsim {

void ReuseGeometry::validate() const {
  if (line_bytes == 0 || !std::has_single_bit(std::uint64_t{line_bytes})) {
    throw ConfigError("reuse geometry: line_bytes must be a power of two");
  }
  if (sets == 0 || !std::has_single_bit(sets)) {
    throw ConfigError("reuse geometry: set count must be a power of two");
  }
  if (data_ways == 0 || tag_ways < data_ways || tag_ways > 64) {
    throw ConfigError("reuse geometry: need tag_ways >= data_ways >= 1, tag_ways <= 64");
  }
}

ReuseCache::ReuseCache(const ReuseGeometry& geometry) : geometry_(geometry) {
  geometry_.validate();
  line_shift_ = static_cast<unsigned>(std::countr_zero(std::uint64_t{geometry_.line_bytes}));
  set_shift_ = static_cast<unsigned>(std::countr_zero(geometry_.sets));
  tags_.assign(geometry_.sets, std::vector<TagEntry>(geometry_.tag_ways));
  data_.assign(geometry_.sets, std::vector<DataEntry>(geometry_.data_ways));
  tag_lru_.reserve(geometry_.sets);
  data_lru_.reserve(geometry_.sets);
  for (std::uint64_t s = 0; s < geometry_.sets; ++s) {
    tag_lru_.emplace_back(PolicyKind::Lru, geometry_.tag_ways);
    data_lru_.emplace_back(PolicyKind::Lru, geometry_.data_ways);
  }
}

std::uint64_t ReuseCache::set_index(std::uint64_t address) const {
  return (address >> line_shift_) & (geometry_.sets - 1);
}

std::uint64_t ReuseCache::tag_of(std::uint64_t address) const {
  return address >> (line_shift_ + set_shift_);
}

std::uint64_t ReuseCache::line_address(std::uint64_t tag, std::uint64_t set) const {
  return ((tag << set_shift_) | set) << line_shift_;
}

int ReuseCache::find_tag(std::uint64_t set, std::uint64_t tag) const {
  const auto& ways = tags_[set];
  for (unsigned w = 0; w < ways.size(); ++w) {
    if (ways[w].valid && ways[w].tag == tag) return static_cast<int>(w);
  }
  return -1;
}

unsigned ReuseCache::pick_tag_victim(std::uint64_t set) const {
  const auto& ways = tags_[set];
  for (unsigned w = 0; w < ways.size(); ++w) {
    if (!ways[w].valid) return w;
  }
  return tag_lru_[set].victim(WayMask::full(geometry_.tag_ways));
}

unsigned ReuseCache::pick_data_victim(std::uint64_t set) const {
  const auto& ways = data_[set];
  for (unsigned w = 0; w < ways.size(); ++w) {
    if (!ways[w].valid) return w;
  }
  return data_lru_[set].victim(WayMask::full(geometry_.data_ways));
}

// Evicts a data entry to make room, installs the new one and links the
// pointers both ways. The displaced entry's owner keeps its tag (and its
// saturated counter), only the pointer is cleared.
void ReuseCache::allocate_data(std::uint64_t set, unsigned tag_way, Op op, ReuseOutcome& out) {
  unsigned data_way = pick_data_victim(set);
  DataEntry& entry = data_[set][data_way];
  if (entry.valid) {
    assert(!out.data_evicted);
    TagEntry& owner = tags_[set][entry.rev];
    out.data_evicted = Eviction{line_address(owner.tag, set), entry.dirty};
    if (entry.dirty) out.dram_writeback = true;
    owner.fwd = -1;
  }
  entry = DataEntry{true, op == Op::Write, tag_way};
  tags_[set][tag_way].fwd = static_cast<int>(data_way);
  data_lru_[set].touch(data_way);
  out.data_allocated = true;
}

// Tag eviction path: a linked data entry goes out with the tag.
void ReuseCache::drop_tag(std::uint64_t set, unsigned tag_way, ReuseOutcome& out) {
  TagEntry& entry = tags_[set][tag_way];
  std::uint64_t address = line_address(entry.tag, set);
  out.tag_evicted = address;
  if (entry.fwd >= 0) {
    DataEntry& linked = data_[set][entry.fwd];
    out.data_evicted = Eviction{address, linked.dirty};
    if (linked.dirty) out.dram_writeback = true;
    linked = DataEntry{};
  }
  entry = TagEntry{};
}

ReuseOutcome ReuseCache::access(std::uint64_t address, Op op) {
  assert(op != Op::IFetch);
  std::uint64_t set = set_index(address);
  std::uint64_t tag = tag_of(address);
  ReuseOutcome out;

  int tag_way = find_tag(set, tag);
  if (tag_way >= 0) {
    out.tag_hit = true;
    TagEntry& entry = tags_[set][tag_way];
    tag_lru_[set].touch(static_cast<unsigned>(tag_way));

    if (entry.fwd >= 0) {
      out.data_hit = true;
      data_lru_[set].touch(static_cast<unsigned>(entry.fwd));
      if (op == Op::Write) data_[set][entry.fwd].dirty = true;
    } else {
      if (entry.reuse_count < geometry_.hysteresis) ++entry.reuse_count;
      if (entry.reuse_count >= geometry_.hysteresis) {
        // Counter at the threshold (or data was evicted after saturating):
        // place the data on this access.
        allocate_data(set, static_cast<unsigned>(tag_way), op, out);
        out.dram_fetch = (op == Op::Read);
      } else if (op == Op::Read) {
        // Re-referenced but still below threshold: memory services it.
        out.dram_fetch = true;
      } else {
        out.wrote_through = true;
      }
    }
#ifndef NDEBUG
    check_set(set);
#endif
    return out;
  }

  // First access: install only the tag; the line itself goes straight to
  // the requester (Read) or straight to memory (Write).
  unsigned victim = pick_tag_victim(set);
  if (tags_[set][victim].valid) drop_tag(set, victim, out);
  tags_[set][victim] = TagEntry{true, tag, -1, 0};
  tag_lru_[set].touch(victim);
  if (geometry_.hysteresis == 0) {
    allocate_data(set, victim, op, out);
    out.dram_fetch = (op == Op::Read);
  } else if (op == Op::Read) {
    out.dram_fetch = true;
  } else {
    out.wrote_through = true;
  }
#ifndef NDEBUG
  check_set(set);
#endif
  return out;
}

std::pair<std::uint64_t, std::optional<bool>> ReuseCache::evict_tag(std::uint64_t set,
                                                                    unsigned tag_way) {
  if (set >= geometry_.sets || tag_way >= geometry_.tag_ways || !tags_[set][tag_way].valid) {
    throw std::logic_error("evict_tag: invalid tag way");
  }
  ReuseOutcome out;
  drop_tag(set, tag_way, out);
#ifndef NDEBUG
  check_set(set);
#endif
  std::optional<bool> data_dirty;
  if (out.data_evicted) data_dirty = out.data_evicted->dirty;
  return {*out.tag_evicted, data_dirty};
}

Eviction ReuseCache::evict_data(std::uint64_t set, unsigned data_way) {
  if (set >= geometry_.sets || data_way >= geometry_.data_ways || !data_[set][data_way].valid) {
    throw std::logic_error("evict_data: invalid data way");
  }
  DataEntry& entry = data_[set][data_way];
  TagEntry& owner = tags_[set][entry.rev];
  Eviction evicted{line_address(owner.tag, set), entry.dirty};
  owner.fwd = -1;
  entry = DataEntry{};
#ifndef NDEBUG
  check_set(set);
#endif
  return evicted;
}

bool ReuseCache::tag_present(std::uint64_t address) const {
  return find_tag(set_index(address), tag_of(address)) >= 0;
}

bool ReuseCache::data_present(std::uint64_t address) const {
  int tag_way = find_tag(set_index(address), tag_of(address));
  return tag_way >= 0 && tags_[set_index(address)][tag_way].fwd >= 0;
}

std::uint64_t ReuseCache::data_occupancy() const {
  std::uint64_t count = 0;
  for (const auto& set : data_) {
    for (const auto& entry : set) count += entry.valid;
  }
  return count;
}

void ReuseCache::check_invariants() const {
  for (std::uint64_t set = 0; set < geometry_.sets; ++set) check_set(set);
}

void ReuseCache::check_set(std::uint64_t set) const {
  const auto& tags = tags_[set];
  const auto& data = data_[set];
  for (unsigned tw = 0; tw < geometry_.tag_ways; ++tw) {
    const TagEntry& te = tags[tw];
    if (!te.valid) {
      if (te.fwd >= 0) throw std::logic_error("invalid tag holds a forward pointer");
      continue;
    }
    if (te.reuse_count > geometry_.hysteresis) {
      throw std::logic_error("reuse counter exceeds hysteresis");
    }
    for (unsigned other = tw + 1; other < geometry_.tag_ways; ++other) {
      if (tags[other].valid && tags[other].tag == te.tag) {
        throw std::logic_error("duplicate tag in set");
      }
    }
    if (te.fwd >= 0) {
      if (te.fwd >= static_cast<int>(geometry_.data_ways) || !data[te.fwd].valid ||
          data[te.fwd].rev != tw) {
        throw std::logic_error("forward pointer not mirrored by data entry");
      }
    }
  }
  for (unsigned dw = 0; dw < geometry_.data_ways; ++dw) {
    const DataEntry& de = data[dw];
    if (!de.valid) {
      if (de.dirty) throw std::logic_error("invalid data entry marked dirty");
      continue;
    }
    if (de.rev >= geometry_.tag_ways || !tags[de.rev].valid ||
        tags[de.rev].fwd != static_cast<int>(dw)) {
      throw std::logic_error("reverse pointer not mirrored by tag entry");
    }
  }
}

}  // namespace hcsim
