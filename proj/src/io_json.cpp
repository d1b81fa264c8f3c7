#include "hcsim/io_json.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>

namespace hcsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void field_fail(const std::string& context, const std::string& field,
                             const std::string& what) {
  throw ConfigError(context + ": field '" + field + "' " + what);
}

void reject_unknown_keys(const json& obj, const std::string& context,
                         const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) field_fail(context, key, "is not recognized");
  }
}

std::uint64_t get_u64(const json& obj, const std::string& context, const std::string& field,
                      std::uint64_t fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_number_unsigned()) field_fail(context, field, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double get_double(const json& obj, const std::string& context, const std::string& field,
                  double fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_number()) field_fail(context, field, "must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& context, const std::string& field,
              bool fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_boolean()) field_fail(context, field, "must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& context, const std::string& field) {
  if (!obj.contains(field)) field_fail(context, field, "is required");
  const json& v = obj.at(field);
  if (!v.is_string()) field_fail(context, field, "must be a string");
  return v.get<std::string>();
}

// Derives per-stream seeds from the manifest seed (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  return doc;
}

GeneratorManifest parse_generator_manifest(const json& doc) {
  const std::string ctx = "generator manifest";
  if (!doc.is_object()) throw ConfigError(ctx + ": top level must be an object");
  reject_unknown_keys(doc, ctx, {"seed", "weights", "streams"});
  if (!doc.contains("streams") || !doc.at("streams").is_array() || doc.at("streams").empty()) {
    field_fail(ctx, "streams", "must be a non-empty array");
  }

  GeneratorManifest manifest;
  manifest.seed = get_u64(doc, ctx, "seed", 0);

  std::size_t index = 0;
  for (const json& s : doc.at("streams")) {
    std::string sctx = ctx + " stream " + std::to_string(index);
    if (!s.is_object()) throw ConfigError(sctx + ": must be an object");
    reject_unknown_keys(s, sctx,
                        {"source", "kind", "base_address", "footprint_bytes", "record_count",
                         "stride_bytes", "reuse_factor", "write_fraction", "seed",
                         "icount_per_access", "line_bytes"});
    GeneratorSpec spec;
    auto source = Source::parse(get_string(s, sctx, "source"));
    if (!source) field_fail(sctx, "source", "must look like cpu0 / gpu3");
    spec.source = *source;
    auto kind = parse_generator_kind(get_string(s, sctx, "kind"));
    if (!kind) {
      field_fail(sctx, "kind",
                 "must be one of Streaming, WorkingSet, StridedBlocked, PointerChase");
    }
    spec.kind = *kind;
    spec.base_address = get_u64(s, sctx, "base_address", 0);
    spec.footprint_bytes = get_u64(s, sctx, "footprint_bytes", 0);
    spec.record_count = get_u64(s, sctx, "record_count", 0);
    spec.stride_bytes = get_u64(s, sctx, "stride_bytes", 64);
    spec.reuse_factor = get_u64(s, sctx, "reuse_factor", 1);
    spec.write_fraction = get_double(s, sctx, "write_fraction", 0.0);
    spec.seed = get_u64(s, sctx, "seed", derive_seed(manifest.seed, index));
    spec.icount_per_access = get_u64(s, sctx, "icount_per_access", 1);
    spec.line_bytes = get_u64(s, sctx, "line_bytes", 64);
    try {
      spec.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(sctx + ": " + e.what());
    }
    manifest.streams.push_back(spec);
    ++index;
  }

  if (doc.contains("weights")) {
    if (!doc.at("weights").is_array()) field_fail(ctx, "weights", "must be an array");
    for (const json& w : doc.at("weights")) {
      if (!w.is_number_unsigned() || w.get<std::uint64_t>() == 0) {
        field_fail(ctx, "weights", "must hold positive integers");
      }
      manifest.weights.push_back(w.get<std::uint64_t>());
    }
    if (manifest.weights.size() != manifest.streams.size()) {
      field_fail(ctx, "weights", "must match the stream count");
    }
  } else {
    manifest.weights.assign(manifest.streams.size(), 1);
  }
  return manifest;
}

GeneratorManifest load_generator_manifest(const std::string& path) {
  return parse_generator_manifest(load_json_file(path));
}

std::vector<TraceRecord> run_manifest(const GeneratorManifest& manifest) {
  std::vector<std::vector<TraceRecord>> streams;
  streams.reserve(manifest.streams.size());
  for (const GeneratorSpec& spec : manifest.streams) streams.push_back(generate(spec));
  return interleave(streams, manifest.weights);
}

namespace {

CacheConfig parse_cache_config(const json& obj, const std::string& context,
                               const CacheConfig& defaults) {
  reject_unknown_keys(obj, context, {"size_bytes", "ways", "line_bytes", "policy", "write_mode"});
  CacheConfig cfg = defaults;
  cfg.geometry.size_bytes = get_u64(obj, context, "size_bytes", defaults.geometry.size_bytes);
  cfg.geometry.ways =
      static_cast<unsigned>(get_u64(obj, context, "ways", defaults.geometry.ways));
  cfg.geometry.line_bytes =
      static_cast<unsigned>(get_u64(obj, context, "line_bytes", defaults.geometry.line_bytes));
  if (obj.contains("policy")) {
    auto policy = parse_policy_kind(get_string(obj, context, "policy"));
    if (!policy) field_fail(context, "policy", "must be LRU, TreePLRU or PseudoLRU");
    cfg.policy = *policy;
  }
  if (obj.contains("write_mode")) {
    auto mode = parse_write_mode(get_string(obj, context, "write_mode"));
    if (!mode) field_fail(context, "write_mode", "must be Writeback or Writethrough");
    cfg.write_mode = *mode;
  }
  return cfg;
}

ordered_json cache_config_to_json(const CacheConfig& cfg) {
  return {{"size_bytes", cfg.geometry.size_bytes},
          {"ways", cfg.geometry.ways},
          {"line_bytes", cfg.geometry.line_bytes},
          {"policy", to_string(cfg.policy)},
          {"write_mode", to_string(cfg.write_mode)}};
}

}  // namespace

HierarchyConfig parse_hierarchy_config(const json& doc) {
  const std::string ctx = "hierarchy config";
  if (!doc.is_object()) throw ConfigError(ctx + ": top level must be an object");
  reject_unknown_keys(doc, ctx,
                      {"cpu_cores", "gpu_cus", "gpu_cus_per_l1i", "cpu_l2_shared", "cpu_l1i",
                       "cpu_l1d", "cpu_l2", "gpu_l1d", "gpu_l1i", "gpu_l2", "llc", "llc_scheme",
                       "partition_cpu_ways", "reuse", "latencies", "bus_bytes_per_cycle",
                       "cpi_base", "dram_bytes"});

  HierarchyConfig cfg;
  cfg.cpu_cores = static_cast<unsigned>(get_u64(doc, ctx, "cpu_cores", cfg.cpu_cores));
  cfg.gpu_cus = static_cast<unsigned>(get_u64(doc, ctx, "gpu_cus", cfg.gpu_cus));
  cfg.gpu_cus_per_l1i =
      static_cast<unsigned>(get_u64(doc, ctx, "gpu_cus_per_l1i", cfg.gpu_cus_per_l1i));
  cfg.cpu_l2_shared = get_bool(doc, ctx, "cpu_l2_shared", cfg.cpu_l2_shared);

  auto level = [&](const char* name, CacheConfig& target) {
    if (doc.contains(name)) {
      if (!doc.at(name).is_object()) field_fail(ctx, name, "must be an object");
      target = parse_cache_config(doc.at(name), ctx + "." + name, target);
    }
  };
  level("cpu_l1i", cfg.cpu_l1i);
  level("cpu_l1d", cfg.cpu_l1d);
  level("cpu_l2", cfg.cpu_l2);
  level("gpu_l1d", cfg.gpu_l1d);
  level("gpu_l1i", cfg.gpu_l1i);
  level("gpu_l2", cfg.gpu_l2);
  level("llc", cfg.llc);

  if (doc.contains("llc_scheme")) {
    auto scheme = parse_llc_scheme(get_string(doc, ctx, "llc_scheme"));
    if (!scheme) {
      field_fail(ctx, "llc_scheme",
                 "must be one of SharedLRU, StaticPartition, GpuBypass, ReuseCache");
    }
    cfg.llc_scheme = *scheme;
  }
  cfg.partition_cpu_ways =
      static_cast<unsigned>(get_u64(doc, ctx, "partition_cpu_ways", cfg.partition_cpu_ways));

  if (doc.contains("reuse")) {
    const json& r = doc.at("reuse");
    if (!r.is_object()) field_fail(ctx, "reuse", "must be an object");
    std::string rctx = ctx + ".reuse";
    reject_unknown_keys(r, rctx, {"sets", "tag_ways", "data_ways", "line_bytes", "hysteresis"});
    cfg.reuse.sets = get_u64(r, rctx, "sets", cfg.reuse.sets);
    cfg.reuse.tag_ways = static_cast<unsigned>(get_u64(r, rctx, "tag_ways", cfg.reuse.tag_ways));
    cfg.reuse.data_ways =
        static_cast<unsigned>(get_u64(r, rctx, "data_ways", cfg.reuse.data_ways));
    cfg.reuse.line_bytes =
        static_cast<unsigned>(get_u64(r, rctx, "line_bytes", cfg.reuse.line_bytes));
    cfg.reuse.hysteresis =
        static_cast<unsigned>(get_u64(r, rctx, "hysteresis", cfg.reuse.hysteresis));
  }

  if (doc.contains("latencies")) {
    const json& l = doc.at("latencies");
    if (!l.is_object()) field_fail(ctx, "latencies", "must be an object");
    std::string lctx = ctx + ".latencies";
    reject_unknown_keys(l, lctx, {"l1", "l2", "llc", "dram"});
    cfg.latencies.l1 = get_u64(l, lctx, "l1", cfg.latencies.l1);
    cfg.latencies.l2 = get_u64(l, lctx, "l2", cfg.latencies.l2);
    cfg.latencies.llc = get_u64(l, lctx, "llc", cfg.latencies.llc);
    cfg.latencies.dram = get_u64(l, lctx, "dram", cfg.latencies.dram);
  }

  cfg.bus_bytes_per_cycle = get_u64(doc, ctx, "bus_bytes_per_cycle", cfg.bus_bytes_per_cycle);
  cfg.cpi_base = get_double(doc, ctx, "cpi_base", cfg.cpi_base);
  cfg.dram_bytes = get_u64(doc, ctx, "dram_bytes", cfg.dram_bytes);
  cfg.validate();
  return cfg;
}

HierarchyConfig load_hierarchy_config(const std::string& path) {
  return parse_hierarchy_config(load_json_file(path));
}

ordered_json hierarchy_config_to_json(const HierarchyConfig& cfg) {
  ordered_json out;
  out["cpu_cores"] = cfg.cpu_cores;
  out["gpu_cus"] = cfg.gpu_cus;
  out["gpu_cus_per_l1i"] = cfg.gpu_cus_per_l1i;
  out["cpu_l2_shared"] = cfg.cpu_l2_shared;
  out["cpu_l1i"] = cache_config_to_json(cfg.cpu_l1i);
  out["cpu_l1d"] = cache_config_to_json(cfg.cpu_l1d);
  out["cpu_l2"] = cache_config_to_json(cfg.cpu_l2);
  out["gpu_l1d"] = cache_config_to_json(cfg.gpu_l1d);
  out["gpu_l1i"] = cache_config_to_json(cfg.gpu_l1i);
  out["gpu_l2"] = cache_config_to_json(cfg.gpu_l2);
  out["llc"] = cache_config_to_json(cfg.llc);
  out["llc_scheme"] = to_string(cfg.llc_scheme);
  out["partition_cpu_ways"] = cfg.partition_cpu_ways;
  out["reuse"] = {{"sets", cfg.reuse.sets},
                  {"tag_ways", cfg.reuse.tag_ways},
                  {"data_ways", cfg.reuse.data_ways},
                  {"line_bytes", cfg.reuse.line_bytes},
                  {"hysteresis", cfg.reuse.hysteresis}};
  out["latencies"] = {{"l1", cfg.latencies.l1},
                      {"l2", cfg.latencies.l2},
                      {"llc", cfg.latencies.llc},
                      {"dram", cfg.latencies.dram}};
  out["bus_bytes_per_cycle"] = cfg.bus_bytes_per_cycle;
  out["cpi_base"] = cfg.cpi_base;
  out["dram_bytes"] = cfg.dram_bytes;
  return out;
}

namespace {

ordered_json level_to_json(const LevelCounters& c) {
  return {{"accesses", c.accesses}, {"hits", c.hits}, {"misses", c.misses}};
}

}  // namespace

ordered_json report_to_json(const MetricsReport& report) {
  ordered_json out;
  out["scheme"] = report.scheme;
  out["trace"] = report.trace_label;
  ordered_json sources = ordered_json::object();
  for (const auto& [src, m] : report.sources) {
    ordered_json s;
    s["instructions"] = m.instructions;
    s["cycles"] = m.cycles;
    s["ipc"] = m.ipc;
    s["mpki"] = m.mpki;
    s["levels"] = {{"l1i", level_to_json(m.l1i)},
                   {"l1d", level_to_json(m.l1d)},
                   {"l2", level_to_json(m.l2)},
                   {"llc", level_to_json(m.llc)}};
    s["l1_writebacks"] = m.l1_writebacks;
    s["l1_through_writes"] = m.l1_through_writes;
    s["l2_writebacks"] = m.l2_writebacks;
    sources[src.name()] = std::move(s);
  }
  out["sources"] = std::move(sources);
  out["dram"] = {{"line_transfers", report.dram.line_transfers()},
                 {"llc_fills", report.dram.llc_fills},
                 {"llc_writebacks", report.dram.llc_writebacks},
                 {"bypass_transfers", report.dram.bypass_transfers},
                 {"writethrough_transfers", report.dram.writethrough_transfers}};
  out["reuse_llc"] = {{"data_allocations", report.reuse.data_allocations},
                      {"tag_evictions", report.reuse.tag_evictions},
                      {"data_evictions", report.reuse.data_evictions}};
  out["totals"] = {{"instructions", report.total_instructions},
                   {"cycles", report.total_cycles},
                   {"bus_utilization", report.bus_utilization},
                   {"ipc_sum", report.ipc_sum},
                   {"line_bytes", report.line_bytes},
                   {"bus_bytes_per_cycle", report.bus_bytes_per_cycle}};
  return out;
}

std::string report_to_csv(const MetricsReport& report) {
  std::string out = "scope,metric,value\n";
  auto row = [&out](const std::string& scope, const std::string& metric,
                    const std::string& value) {
    out += scope + ',' + metric + ',' + value + '\n';
  };
  auto count_row = [&row](const std::string& scope, const std::string& metric,
                          std::uint64_t value) { row(scope, metric, std::to_string(value)); };

  for (const auto& [src, m] : report.sources) {
    const std::string scope = src.name();
    count_row(scope, "instructions", m.instructions);
    row(scope, "cycles", format_double(m.cycles));
    row(scope, "ipc", format_double(m.ipc));
    row(scope, "mpki", format_double(m.mpki));
    const std::pair<const char*, const LevelCounters*> levels[] = {
        {"l1i", &m.l1i}, {"l1d", &m.l1d}, {"l2", &m.l2}, {"llc", &m.llc}};
    for (const auto& [name, c] : levels) {
      count_row(scope, std::string(name) + "_accesses", c->accesses);
      count_row(scope, std::string(name) + "_hits", c->hits);
      count_row(scope, std::string(name) + "_misses", c->misses);
    }
    count_row(scope, "l1_writebacks", m.l1_writebacks);
    count_row(scope, "l1_through_writes", m.l1_through_writes);
    count_row(scope, "l2_writebacks", m.l2_writebacks);
  }
  count_row("global", "dram_line_transfers", report.dram.line_transfers());
  count_row("global", "llc_fills", report.dram.llc_fills);
  count_row("global", "llc_writebacks", report.dram.llc_writebacks);
  count_row("global", "bypass_transfers", report.dram.bypass_transfers);
  count_row("global", "writethrough_transfers", report.dram.writethrough_transfers);
  count_row("global", "reuse_data_allocations", report.reuse.data_allocations);
  count_row("global", "reuse_tag_evictions", report.reuse.tag_evictions);
  count_row("global", "reuse_data_evictions", report.reuse.data_evictions);
  count_row("global", "instructions", report.total_instructions);
  row("global", "cycles", format_double(report.total_cycles));
  row("global", "bus_utilization", format_double(report.bus_utilization));
  row("global", "ipc_sum", format_double(report.ipc_sum));
  row("global", "scheme", report.scheme);
  return out;
}

std::string emit_report(const MetricsReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) return report_to_csv(report);
  return report_to_json(report).dump(2) + "\n";
}

ordered_json histogram_to_json(const ReuseHistogram& hist, WorkloadClass cls,
                               std::uint64_t llc_lines) {
  ordered_json buckets = ordered_json::object();
  for (const auto& [distance, count] : hist.finite) {
    buckets[std::to_string(distance)] = count;
  }
  ordered_json out;
  out["line_bytes"] = hist.line_bytes;
  out["llc_lines"] = llc_lines;
  out["records"] = hist.total();
  out["first_touches"] = hist.infinite;
  out["finite_fraction"] =
      hist.total() ? static_cast<double>(hist.finite_total()) / hist.total() : 0.0;
  out["classification"] = to_string(cls);
  out["histogram"] = std::move(buckets);
  return out;
}

ordered_json area_report_to_json(const CacheGeometry& conventional, const ReuseGeometry& reuse,
                                 unsigned address_bits) {
  AreaBreakdown base = conventional_area_bits(conventional, address_bits);
  AreaBreakdown rc = reuse_area_bits(reuse, address_bits);
  auto breakdown = [](const AreaBreakdown& a) {
    return ordered_json{{"data_bits", a.data_bits},
                        {"tag_bits", a.tag_bits},
                        {"pointer_bits", a.pointer_bits},
                        {"state_bits", a.state_bits},
                        {"replacement_bits", a.replacement_bits},
                        {"total_bits", a.total()}};
  };
  ordered_json out;
  out["address_bits"] = address_bits;
  out["conventional"] = breakdown(base);
  out["conventional"]["size_bytes"] = conventional.size_bytes;
  out["reuse"] = breakdown(rc);
  out["reuse"]["tag_capacity_bytes"] = reuse.tag_capacity_bytes();
  out["reuse"]["data_capacity_bytes"] = reuse.data_capacity_bytes();
  out["reduction_vs_conventional"] =
      1.0 - static_cast<double>(rc.total()) / static_cast<double>(base.total());
  return out;
}

}  // namespace hcsim
