#include "hcsim/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace hcsim {

namespace {

[[noreturn]] void parse_fail(std::size_t line_number, const std::string& what) {
  throw ParseError("trace line " + std::to_string(line_number) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > begin) fields.push_back(line.substr(begin, i - begin));
  }
  return fields;
}

// 53-bit uniform draw in [0,1); the engine output is fully specified by the
// standard so traces are reproducible across toolchains.
bool bernoulli(std::mt19937_64& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Sattolo's algorithm: a uniformly random single-cycle permutation.
std::vector<std::uint32_t> single_cycle_permutation(std::mt19937_64& rng, std::uint64_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::uint64_t i = n - 1; i >= 1; --i) {
    std::uint64_t j = uniform_below(rng, i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

TraceRecord parse_trace_line(std::string_view line, std::size_t line_number) {
  auto fields = split_fields(line);
  if (fields.size() != 4) {
    parse_fail(line_number,
               "expected 4 fields <source> <op> <hex-address> <icount>, got " +
                   std::to_string(fields.size()));
  }

  TraceRecord rec;
  auto source = Source::parse(fields[0]);
  if (!source) parse_fail(line_number, "unknown source '" + std::string(fields[0]) + "'");
  rec.source = *source;

  if (fields[1] == "R") {
    rec.op = Op::Read;
  } else if (fields[1] == "W") {
    rec.op = Op::Write;
  } else if (fields[1] == "I") {
    rec.op = Op::IFetch;
  } else {
    parse_fail(line_number, "unknown op '" + std::string(fields[1]) + "'");
  }

  std::string_view addr = fields[2];
  if (addr.starts_with("0x") || addr.starts_with("0X")) addr.remove_prefix(2);
  if (addr.empty()) parse_fail(line_number, "bad address '" + std::string(fields[2]) + "'");
  auto [aptr, aec] = std::from_chars(addr.data(), addr.data() + addr.size(), rec.address, 16);
  if (aec != std::errc{} || aptr != addr.data() + addr.size()) {
    parse_fail(line_number, "bad address '" + std::string(fields[2]) + "'");
  }
  if (rec.address > kMaxAddress) {
    parse_fail(line_number, "address '" + std::string(fields[2]) + "' exceeds 48 bits");
  }

  auto [iptr, iec] =
      std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), rec.icount);
  if (iec != std::errc{} || iptr != fields[3].data() + fields[3].size()) {
    parse_fail(line_number, "bad icount '" + std::string(fields[3]) + "'");
  }
  if (rec.icount < 1) parse_fail(line_number, "icount must be >= 1");
  return rec;
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    records.push_back(parse_trace_line(line, line_number));
  }
  return records;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  return read_trace(in);
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  char buf[19];
  for (const auto& rec : records) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rec.address, 16);
    (void)ec;
    out << rec.source.name() << ' ' << to_string(rec.op) << " 0x"
        << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << ' ' << rec.icount
        << '\n';
  }
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Streaming: return "Streaming";
    case GeneratorKind::WorkingSet: return "WorkingSet";
    case GeneratorKind::StridedBlocked: return "StridedBlocked";
    case GeneratorKind::PointerChase: return "PointerChase";
  }
  return "?";
}

std::optional<GeneratorKind> parse_generator_kind(std::string_view token) {
  if (token == "Streaming") return GeneratorKind::Streaming;
  if (token == "WorkingSet") return GeneratorKind::WorkingSet;
  if (token == "StridedBlocked") return GeneratorKind::StridedBlocked;
  if (token == "PointerChase") return GeneratorKind::PointerChase;
  return std::nullopt;
}

void GeneratorSpec::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("generator spec: " + what); };
  if (line_bytes == 0 || (line_bytes & (line_bytes - 1)) != 0) {
    fail("line_bytes must be a nonzero power of two");
  }
  if (record_count == 0) fail("record_count must be >= 1");
  if (footprint_bytes < line_bytes) fail("footprint_bytes must cover at least one line");
  if (base_address % line_bytes != 0) fail("base_address must be line-aligned");
  if (base_address > kMaxAddress || footprint_bytes > kMaxAddress - base_address + 1) {
    fail("base_address + footprint_bytes must stay below 2^48");
  }
  if (write_fraction < 0.0 || write_fraction > 1.0) fail("write_fraction must lie in [0,1]");
  if (icount_per_access == 0) fail("icount_per_access must be >= 1");
  if (kind == GeneratorKind::Streaming || kind == GeneratorKind::StridedBlocked) {
    if (stride_bytes == 0) fail("stride_bytes must be >= 1");
  }
  if (reuse_factor == 0) fail("reuse_factor must be >= 1");
}

std::vector<TraceRecord> generate(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<TraceRecord> records;
  records.reserve(spec.record_count);

  auto emit = [&](std::uint64_t offset) {
    TraceRecord rec;
    rec.source = spec.source;
    rec.address = spec.base_address + offset;
    rec.op = bernoulli(rng, spec.write_fraction) ? Op::Write : Op::Read;
    rec.icount = spec.icount_per_access;
    records.push_back(rec);
  };

  switch (spec.kind) {
    case GeneratorKind::Streaming: {
      std::uint64_t offset = 0;
      for (std::uint64_t i = 0; i < spec.record_count; ++i) {
        emit(offset);
        offset = (offset + spec.stride_bytes) % spec.footprint_bytes;
      }
      break;
    }
    case GeneratorKind::WorkingSet: {
      std::uint64_t lines = spec.footprint_bytes / spec.line_bytes;
      for (std::uint64_t i = 0; i < spec.record_count; ++i) {
        emit(uniform_below(rng, lines) * spec.line_bytes);
      }
      break;
    }
    case GeneratorKind::StridedBlocked: {
      std::uint64_t block_lines =
          std::max<std::uint64_t>(1, spec.footprint_bytes / spec.reuse_factor / spec.line_bytes);
      std::uint64_t block_bytes = block_lines * spec.line_bytes;
      std::uint64_t blocks = std::max<std::uint64_t>(1, spec.footprint_bytes / block_bytes);
      std::uint64_t emitted = 0;
      for (std::uint64_t block = 0; emitted < spec.record_count; block = (block + 1) % blocks) {
        for (std::uint64_t sweep = 0; sweep < spec.reuse_factor && emitted < spec.record_count;
             ++sweep) {
          for (std::uint64_t off = 0; off < block_bytes && emitted < spec.record_count;
               off += spec.stride_bytes) {
            emit(block * block_bytes + off);
            ++emitted;
          }
        }
      }
      break;
    }
    case GeneratorKind::PointerChase: {
      std::uint64_t lines = spec.footprint_bytes / spec.line_bytes;
      if (lines == 1) {
        for (std::uint64_t i = 0; i < spec.record_count; ++i) emit(0);
        break;
      }
      auto perm = single_cycle_permutation(rng, lines);
      std::uint64_t cur = 0;
      for (std::uint64_t i = 0; i < spec.record_count; ++i) {
        emit(cur * spec.line_bytes);
        cur = perm[cur];
      }
      break;
    }
  }
  return records;
}

std::vector<TraceRecord> interleave(std::span<const std::vector<TraceRecord>> streams,
                                    std::span<const std::uint64_t> weights) {
  if (streams.empty()) throw ConfigError("interleave: stream list is empty");
  if (weights.size() != streams.size()) {
    throw ConfigError("interleave: weights count does not match stream count");
  }
  for (std::uint64_t w : weights) {
    if (w == 0) throw ConfigError("interleave: weights must be positive");
  }

  std::size_t total = 0;
  for (const auto& s : streams) total += s.size();
  std::vector<TraceRecord> merged;
  merged.reserve(total);

  std::vector<std::size_t> cursor(streams.size(), 0);
  while (merged.size() < total) {
    for (std::size_t i = 0; i < streams.size(); ++i) {
      for (std::uint64_t k = 0; k < weights[i] && cursor[i] < streams[i].size(); ++k) {
        merged.push_back(streams[i][cursor[i]++]);
      }
    }
  }
  return merged;
}

}  // namespace hcsim
