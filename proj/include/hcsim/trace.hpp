#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hcsim/types.hpp"

namespace hcsim {

/// Parses one record line: `<source> <op> <hex-address> <icount>`, e.g.
/// `cpu0 R 0x1040 3`. Ops are R/W/I, the address may carry a 0x prefix.
/// `line_number` is only used in error messages.
TraceRecord parse_trace_line(std::string_view line, std::size_t line_number = 0);

/// Reads a whole trace. Blank lines and `#` comment lines are skipped.
std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace_file(const std::string& path);

void write_trace(std::ostream& out, std::span<const TraceRecord> records);

enum class GeneratorKind : std::uint8_t {
  Streaming,       // sequential stride walk, wraps at the footprint
  WorkingSet,      // uniform line-aligned draws from the footprint
  StridedBlocked,  // sweeps one block repeatedly before advancing
  PointerChase,    // fixed random permutation cycle over the footprint's lines
};

std::string_view to_string(GeneratorKind kind);
std::optional<GeneratorKind> parse_generator_kind(std::string_view token);

/// Parameterized synthetic workload. Each kind models one access-pattern
/// class: Streaming ~ histogram-style kernels, WorkingSet ~ cache-friendly
/// codes, StridedBlocked ~ blocked matrix kernels, PointerChase ~ graph
/// traversal over a large footprint.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Streaming;
  Source source = Source::cpu(0);
  std::uint64_t base_address = 0;
  std::uint64_t footprint_bytes = 0;
  std::uint64_t record_count = 0;
  std::uint64_t stride_bytes = 64;  // Streaming, StridedBlocked
  std::uint64_t reuse_factor = 1;   // StridedBlocked: block divisor and sweep count
  double write_fraction = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t icount_per_access = 1;
  std::uint64_t line_bytes = 64;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Deterministic for a fixed spec; all addresses lie in
/// [base_address, base_address + footprint_bytes).
std::vector<TraceRecord> generate(const GeneratorSpec& spec);

/// Weighted round-robin merge: weights[i] consecutive records from stream i
/// per cycle; exhausted streams are skipped; per-stream order is preserved.
std::vector<TraceRecord> interleave(std::span<const std::vector<TraceRecord>> streams,
                                    std::span<const std::uint64_t> weights);

}  // namespace hcsim
