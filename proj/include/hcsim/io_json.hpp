#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcsim/analysis.hpp"
#include "hcsim/hierarchy.hpp"
#include "hcsim/metrics.hpp"
#include "hcsim/trace.hpp"

namespace hcsim {

enum class ReportFormat : std::uint8_t { Json, Csv };

/// Generator manifest: top-level seed, per-cycle weights and one stream
/// object per generator, field names as in GeneratorSpec plus "source".
/// Streams without an explicit seed get one derived from the manifest seed
/// and their position.
struct GeneratorManifest {
  std::uint64_t seed = 0;
  std::vector<GeneratorSpec> streams;
  std::vector<std::uint64_t> weights;  // defaults to all-ones
};

GeneratorManifest parse_generator_manifest(const nlohmann::json& doc);
GeneratorManifest load_generator_manifest(const std::string& path);
std::vector<TraceRecord> run_manifest(const GeneratorManifest& manifest);

/// Config JSON mirrors HierarchyConfig field names; unspecified fields keep
/// the defaults. Unknown keys are rejected.
HierarchyConfig parse_hierarchy_config(const nlohmann::json& doc);
HierarchyConfig load_hierarchy_config(const std::string& path);
nlohmann::ordered_json hierarchy_config_to_json(const HierarchyConfig& config);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
std::string report_to_csv(const MetricsReport& report);
std::string emit_report(const MetricsReport& report, ReportFormat format);

nlohmann::ordered_json histogram_to_json(const ReuseHistogram& hist, WorkloadClass cls,
                                         std::uint64_t llc_lines);
nlohmann::ordered_json area_report_to_json(const CacheGeometry& conventional,
                                           const ReuseGeometry& reuse, unsigned address_bits);

nlohmann::json load_json_file(const std::string& path);

}  // namespace hcsim
