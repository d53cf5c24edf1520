#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "citymap/geocoder.hpp"
#include "citymap/percentile.hpp"
#include "citymap/wos_parser.hpp"

namespace citymap {

enum class MapMode { topk, i3, ri3r };

std::string_view to_string(MapMode mode);
std::optional<MapMode> parse_map_mode(std::string_view text);

struct GeocoderSettings {
  std::optional<std::filesystem::path> gazetteer;
  std::optional<std::filesystem::path> cache;
  bool remote = false;
  RemoteConfig remote_config;
};

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  CorpusFilter filter;
  double top_percent = 10.0;
  int min_city_size = 5;
  int min_top = 0;
  MapMode mode = MapMode::topk;
  // Unset means the mode default: year/field for topk, year+doctype/field
  // for the impact modes.
  std::optional<GroupBy> group_by;
  std::optional<Scope> scope;
  std::optional<std::filesystem::path> alias_table;
  GeocoderSettings geocoder;
  std::filesystem::path out_dir = "out";

  ReferenceGrouping grouping() const;
};

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSummary {
  std::size_t records_parsed = 0;
  std::size_t skipped_blocks = 0;
  std::size_t duplicates = 0;
  std::size_t invalid_records = 0;
  std::size_t filtered_out = 0;
  std::size_t papers_analyzed = 0;
  std::size_t cities_total = 0;
  std::size_t cities_presented = 0;
  std::size_t cities_unlocated = 0;
  std::size_t unresolved_addresses = 0;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> outputs;
};

/// parse -> filter -> extract cities -> percentiles -> statistics ->
/// geocode -> write outputs into `config.out_dir`. Throws PipelineError for
/// unreadable input or an empty corpus and ConfigError for bad thresholds.
RunSummary run(const RunConfig& config);

}  // namespace citymap
