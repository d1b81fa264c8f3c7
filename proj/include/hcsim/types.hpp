#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hcsim {

inline constexpr unsigned kAddressBits = 48;
inline constexpr std::uint64_t kMaxAddress = (std::uint64_t{1} << kAddressBits) - 1;

enum class Op : std::uint8_t { Read, Write, IFetch };

std::string_view to_string(Op op);

enum class SourceKind : std::uint8_t { Cpu, Gpu };

/// One requester: a CPU core or a GPU compute unit.
struct Source {
  SourceKind kind = SourceKind::Cpu;
  std::uint8_t index = 0;

  static constexpr Source cpu(std::uint8_t i) { return {SourceKind::Cpu, i}; }
  static constexpr Source gpu(std::uint8_t i) { return {SourceKind::Gpu, i}; }

  /// Accepts tokens of the form "cpu<N>" / "gpu<N>".
  static std::optional<Source> parse(std::string_view token);

  std::string name() const;
  bool is_cpu() const { return kind == SourceKind::Cpu; }
  bool is_gpu() const { return kind == SourceKind::Gpu; }

  auto operator<=>(const Source&) const = default;
};

/// One memory access as recorded in a trace.
struct TraceRecord {
  Source source;
  Op op = Op::Read;
  std::uint64_t address = 0;  // byte address, < 2^48
  std::uint64_t icount = 1;   // instructions retired since the source's previous record

  bool operator==(const TraceRecord&) const = default;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hcsim
