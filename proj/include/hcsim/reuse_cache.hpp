#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hcsim/cache.hpp"
#include "hcsim/replacement.hpp"
#include "hcsim/types.hpp"

namespace hcsim {

/// Decoupled tag/data LLC geometry. The data array shares the tag array's
/// set count but holds fewer ways; forward pointers are data-way indices
/// within the set and reverse pointers are tag-way indices.
struct ReuseGeometry {
  std::uint64_t sets = 1024;
  unsigned tag_ways = 16;
  unsigned data_ways = 8;
  unsigned line_bytes = 64;
  unsigned hysteresis = 1;  // re-references required before data allocation

  std::uint64_t tag_capacity_bytes() const {
    return sets * tag_ways * std::uint64_t{line_bytes};
  }
  std::uint64_t data_capacity_bytes() const {
    return sets * data_ways * std::uint64_t{line_bytes};
  }
  void validate() const;
};

struct ReuseOutcome {
  bool tag_hit = false;
  bool data_hit = false;
  bool data_allocated = false;
  std::optional<std::uint64_t> tag_evicted;  // line address of the evicted tag
  std::optional<Eviction> data_evicted;
  bool dram_fetch = false;      // line read from memory to service the access
  bool dram_writeback = false;  // a dirty data entry was written back
  bool wrote_through = false;   // a write with no data entry went straight to memory
};

/// LLC that stores a line's data only once its tag has been re-referenced.
/// The tag array allocates on first miss with a NULL forward pointer; data
/// is placed on the access that brings the line's reuse counter up to the
/// hysteresis threshold. Tag and data evictions are decoupled: evicting a
/// tag drags its data entry along, evicting a data entry only clears the
/// owning tag's pointer and leaves the tag (and its counter) resident.
/// Both arrays run per-set LRU; the tag array is touched on every tag hit,
/// the data array on data hits and insertions only.
class ReuseCache {
 public:
  explicit ReuseCache(const ReuseGeometry& geometry);

  /// op must be Read or Write. A Write models a full-line writeback from
  /// the level above: it never fetches from memory, and when no data entry
  /// can be allocated it writes through to memory instead.
  ReuseOutcome access(std::uint64_t address, Op op);

  /// Invalidates a tag entry; a linked data entry is evicted with it.
  /// Returns the tag's line address and, when data was linked, its dirty
  /// flag. Throws std::logic_error for an invalid way.
  std::pair<std::uint64_t, std::optional<bool>> evict_tag(std::uint64_t set, unsigned tag_way);

  /// Invalidates a data entry; the owning tag's pointer is cleared but the
  /// tag stays valid with its reuse counter intact. Returns the line
  /// address and dirty flag. Throws std::logic_error for an invalid way.
  Eviction evict_data(std::uint64_t set, unsigned data_way);

  bool tag_present(std::uint64_t address) const;
  bool data_present(std::uint64_t address) const;
  std::uint64_t data_occupancy() const;

  const ReuseGeometry& geometry() const { return geometry_; }

  /// Verifies the tag<->data pointer bijection; throws std::logic_error.
  void check_invariants() const;

 private:
  struct TagEntry {
    bool valid = false;
    std::uint64_t tag = 0;
    int fwd = -1;  // data way, -1 = NULL
    unsigned reuse_count = 0;
  };
  struct DataEntry {
    bool valid = false;
    bool dirty = false;
    unsigned rev = 0;  // owning tag way
  };

  std::uint64_t set_index(std::uint64_t address) const;
  std::uint64_t tag_of(std::uint64_t address) const;
  std::uint64_t line_address(std::uint64_t tag, std::uint64_t set) const;
  int find_tag(std::uint64_t set, std::uint64_t tag) const;
  void check_set(std::uint64_t set) const;
  unsigned pick_tag_victim(std::uint64_t set) const;
  unsigned pick_data_victim(std::uint64_t set) const;
  void allocate_data(std::uint64_t set, unsigned tag_way, Op op, ReuseOutcome& out);
  void drop_tag(std::uint64_t set, unsigned tag_way, ReuseOutcome& out);

  ReuseGeometry geometry_;
  unsigned line_shift_;
  unsigned set_shift_;
  std::vector<std::vector<TagEntry>> tags_;
  std::vector<std::vector<DataEntry>> data_;
  std::vector<ReplacementState> tag_lru_;
  std::vector<ReplacementState> data_lru_;
};

}  // namespace hcsim
