#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcsim/analysis.hpp"
#include "hcsim/hierarchy.hpp"
#include "hcsim/io_json.hpp"
#include "hcsim/trace.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hcsim::ConfigError("cannot open output file '" + path + "'");
  out << contents;
  if (!out) throw hcsim::ConfigError("failed writing '" + path + "'");
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::cout << contents;
  } else {
    write_file(out_path, contents);
  }
}

hcsim::ReportFormat parse_format(const std::string& format) {
  if (format == "json") return hcsim::ReportFormat::Json;
  if (format == "csv") return hcsim::ReportFormat::Csv;
  throw hcsim::ConfigError("--format must be json or csv");
}

// GpuBypass runs no coherence between the GPU's DRAM path and CPU-held LLC
// lines, so shared lines are a modeling blind spot worth flagging.
void warn_bypass_overlap(const std::vector<hcsim::TraceRecord>& trace,
                         const hcsim::HierarchyConfig& config) {
  unsigned shift = 0;
  while ((1u << shift) < config.llc.geometry.line_bytes) ++shift;
  std::set<std::uint64_t> cpu_lines, gpu_lines;
  for (const auto& rec : trace) {
    (rec.source.is_cpu() ? cpu_lines : gpu_lines).insert(rec.address >> shift);
  }
  for (std::uint64_t line : gpu_lines) {
    if (cpu_lines.contains(line)) {
      std::cerr << "warning: CPU and GPU traces overlap on line address 0x" << std::hex
                << (line << shift) << std::dec
                << "; GpuBypass models no coherence between them\n";
      return;
    }
  }
}

int cmd_gen(const std::string& spec_path, const std::string& out_path, bool seed_set,
            std::uint64_t seed_override) {
  nlohmann::json doc = hcsim::load_json_file(spec_path);
  if (seed_set) {
    if (!doc.is_object()) throw hcsim::ConfigError("generator manifest: top level must be an object");
    doc["seed"] = seed_override;
  }
  hcsim::GeneratorManifest manifest = hcsim::parse_generator_manifest(doc);
  std::vector<hcsim::TraceRecord> trace = hcsim::run_manifest(manifest);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hcsim::ConfigError("cannot open output file '" + out_path + "'");
  out << "# hcsim trace\n";
  out << "# manifest seed " << manifest.seed << "\n";
  for (std::size_t i = 0; i < manifest.streams.size(); ++i) {
    const auto& s = manifest.streams[i];
    out << "# stream " << i << " source=" << s.source.name() << " kind=" << to_string(s.kind)
        << " seed=" << s.seed << " records=" << s.record_count
        << " weight=" << manifest.weights[i] << "\n";
  }
  hcsim::write_trace(out, trace);
  if (!out) throw hcsim::ConfigError("failed writing '" + out_path + "'");
  std::cout << trace.size() << " records written to " << out_path << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& trace_path,
            const std::string& out_path, const std::string& format) {
  hcsim::HierarchyConfig config = hcsim::load_hierarchy_config(config_path);
  std::vector<hcsim::TraceRecord> trace = hcsim::read_trace_file(trace_path);
  if (config.llc_scheme == hcsim::LlcScheme::GpuBypass) warn_bypass_overlap(trace, config);
  hcsim::MetricsReport report = hcsim::simulate(trace, config, trace_path);
  emit(out_path, hcsim::emit_report(report, parse_format(format)));
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& trace_path,
                const std::vector<std::string>& scheme_names, const std::string& out_path,
                const std::string& format) {
  hcsim::HierarchyConfig config = hcsim::load_hierarchy_config(config_path);
  std::vector<hcsim::TraceRecord> trace = hcsim::read_trace_file(trace_path);
  if (scheme_names.empty()) throw hcsim::ConfigError("--schemes must name at least one scheme");

  std::vector<hcsim::LlcScheme> schemes;
  for (const std::string& name : scheme_names) {
    auto scheme = hcsim::parse_llc_scheme(name);
    if (!scheme) {
      throw hcsim::ConfigError("unknown scheme '" + name +
                               "' (use SharedLRU, StaticPartition, GpuBypass, ReuseCache)");
    }
    schemes.push_back(*scheme);
  }

  hcsim::ReportFormat fmt = parse_format(format);
  std::string csv;
  nlohmann::ordered_json out;
  out["trace"] = trace_path;
  out["schemes"] = nlohmann::ordered_json::object();
  for (hcsim::LlcScheme scheme : schemes) {
    hcsim::HierarchyConfig scheme_config = config;
    scheme_config.llc_scheme = scheme;
    if (scheme == hcsim::LlcScheme::GpuBypass) warn_bypass_overlap(trace, scheme_config);
    hcsim::MetricsReport report = hcsim::simulate(trace, scheme_config, trace_path);
    if (fmt == hcsim::ReportFormat::Json) {
      out["schemes"][report.scheme] = hcsim::report_to_json(report);
    } else {
      std::string one = hcsim::report_to_csv(report);
      // prefix every data row with the scheme
      std::size_t header_end = one.find('\n') + 1;
      if (csv.empty()) csv = "scheme," + one.substr(0, header_end);
      std::size_t pos = header_end;
      while (pos < one.size()) {
        std::size_t eol = one.find('\n', pos);
        csv += report.scheme + ',' + one.substr(pos, eol - pos + 1);
        pos = eol + 1;
      }
    }
  }
  if (fmt == hcsim::ReportFormat::Json) {
    emit(out_path, out.dump(2) + "\n");
  } else {
    emit(out_path, csv);
  }
  return 0;
}

int cmd_analyze(const std::string& trace_path, std::uint64_t llc_lines, unsigned line_bytes,
                const std::string& out_path) {
  std::vector<hcsim::TraceRecord> trace = hcsim::read_trace_file(trace_path);
  if (trace.empty()) throw hcsim::ConfigError("trace '" + trace_path + "' holds no records");
  hcsim::ReuseHistogram hist = hcsim::reuse_distances(trace, line_bytes);
  hcsim::WorkloadClass cls = hcsim::classify(hist, llc_lines);
  emit(out_path, hcsim::histogram_to_json(hist, cls, llc_lines).dump(2) + "\n");
  return 0;
}

int cmd_area(const std::string& config_path, unsigned address_bits,
             const std::string& out_path) {
  hcsim::HierarchyConfig config = hcsim::load_hierarchy_config(config_path);
  emit(out_path,
       hcsim::area_report_to_json(config.llc.geometry, config.reuse, address_bits).dump(2) +
           "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hcsim: trace-driven CPU-GPU shared-LLC simulator"};
  app.require_subcommand(1);

  std::string spec_path, config_path, trace_path, out_path;
  std::string format = "json";
  std::vector<std::string> schemes;
  std::uint64_t seed = 0;
  std::uint64_t llc_lines = 16384;  // 1MB / 64B
  unsigned line_bytes = 64;
  unsigned address_bits = hcsim::kAddressBits;

  CLI::App* gen = app.add_subcommand("gen", "generate a trace from a manifest");
  gen->add_option("--spec", spec_path, "generator manifest (JSON)")->required();
  gen->add_option("--out", out_path, "trace file to write")->required();
  bool seed_set = false;
  gen->add_option("--seed", seed, "override the manifest seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });

  CLI::App* run = app.add_subcommand("run", "simulate one trace under one scheme");
  run->add_option("--config", config_path, "hierarchy config (JSON)")->required();
  run->add_option("--trace", trace_path, "trace file")->required();
  run->add_option("--out", out_path, "report file (stdout when omitted)");
  run->add_option("--format", format, "json|csv");

  CLI::App* compare = app.add_subcommand("compare", "simulate one trace under several schemes");
  compare->add_option("--config", config_path, "hierarchy config (JSON)")->required();
  compare->add_option("--trace", trace_path, "trace file")->required();
  compare->add_option("--schemes", schemes, "comma-separated scheme list")
      ->required()
      ->delimiter(',');
  compare->add_option("--out", out_path, "report file (stdout when omitted)");
  compare->add_option("--format", format, "json|csv");

  CLI::App* analyze = app.add_subcommand("analyze", "reuse-distance histogram and class");
  analyze->add_option("--trace", trace_path, "trace file")->required();
  analyze->add_option("--llc-lines", llc_lines, "LLC capacity in lines for classification");
  analyze->add_option("--line-bytes", line_bytes, "line size for address aggregation");
  analyze->add_option("--out", out_path, "report file (stdout when omitted)");

  CLI::App* area = app.add_subcommand("area", "storage-bit area of the configured LLCs");
  area->add_option("--config", config_path, "hierarchy config (JSON)")->required();
  area->add_option("--address-bits", address_bits, "physical address width");
  area->add_option("--out", out_path, "report file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(spec_path, out_path, seed_set, seed);
    if (run->parsed()) return cmd_run(config_path, trace_path, out_path, format);
    if (compare->parsed()) return cmd_compare(config_path, trace_path, schemes, out_path, format);
    if (analyze->parsed()) return cmd_analyze(trace_path, llc_lines, line_bytes, out_path);
    if (area->parsed()) return cmd_area(config_path, address_bits, out_path);
  } catch (const hcsim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hcsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hcsim::MetricError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
