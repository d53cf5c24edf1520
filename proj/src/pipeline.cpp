#include "citymap/pipeline.hpp"

#include <fmt/format.h>

#include <fstream>
#include <future>
#include <map>
#include <set>

#include "citymap/city.hpp"
#include "citymap/map_emitter.hpp"
#include "citymap/stats.hpp"
#include "json.hpp"

namespace citymap {

namespace {

std::string_view to_string(GroupBy g) { return g == GroupBy::year ? "year" : "year-doctype"; }
std::string_view to_string(Scope s) { return s == Scope::field ? "field" : "journal"; }

class OutputDir {
 public:
  OutputDir(const std::filesystem::path& dir, RunSummary& summary) : dir_(dir), summary_(summary) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw PipelineError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write " + path.string());
    writer(out);
    out.flush();
    if (!out) throw PipelineError("error while writing " + path.string());
    summary_.outputs.push_back(path);
  }

 private:
  std::filesystem::path dir_;
  RunSummary& summary_;
};

std::vector<ParseResult> parse_all(const std::vector<std::filesystem::path>& inputs) {
  std::vector<std::future<ParseResult>> pending;
  pending.reserve(inputs.size());
  for (const auto& path : inputs) {
    pending.push_back(std::async(std::launch::async, [path] { return parse_export_file(path); }));
  }
  std::vector<ParseResult> parsed;
  parsed.reserve(inputs.size());
  std::string failure;
  for (auto& f : pending) {
    try {
      parsed.push_back(f.get());
    } catch (const std::exception& e) {
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw PipelineError(failure);
  return parsed;
}

}  // namespace

std::string_view to_string(MapMode mode) {
  switch (mode) {
    case MapMode::topk: return "topk";
    case MapMode::i3: return "i3";
    case MapMode::ri3r: return "ri3r";
  }
  return "unknown";
}

std::optional<MapMode> parse_map_mode(std::string_view text) {
  if (text == "topk") return MapMode::topk;
  if (text == "i3") return MapMode::i3;
  if (text == "ri3r") return MapMode::ri3r;
  return std::nullopt;
}

ReferenceGrouping RunConfig::grouping() const {
  ReferenceGrouping g;
  g.group_by = group_by.value_or(mode == MapMode::topk ? GroupBy::year : GroupBy::year_and_doctype);
  g.scope = scope.value_or(Scope::field);
  return g;
}

RunSummary run(const RunConfig& config) {
  if (!(config.top_percent > 0.0 && config.top_percent < 100.0)) {
    throw ConfigError(fmt::format("--top-percent must lie in (0, 100), got {}", config.top_percent));
  }
  if (config.min_city_size < 1) throw ConfigError("--min-city-size must be at least 1");
  if (config.min_top < 0) throw ConfigError("--min-top must not be negative");
  if (config.filter.min_year > config.filter.max_year) throw ConfigError("--years range is empty");
  if (config.inputs.empty()) throw PipelineError("no input files");

  RunSummary summary;
  const auto parsed = parse_all(config.inputs);
  for (const auto& p : parsed) {
    summary.records_parsed += p.records.size();
    summary.skipped_blocks += p.skipped_blocks;
  }
  const Corpus merged = merge_exports(parsed);
  summary.duplicates = merged.duplicate_ids.size();

  const FilterResult filtered = filter_corpus(merged, config.filter);
  summary.invalid_records = filtered.invalid.size();
  summary.filtered_out = filtered.excluded;
  const auto& records = filtered.corpus.records;
  summary.papers_analyzed = records.size();
  if (records.empty()) throw PipelineError("no records left after filtering");

  const AliasTable aliases = config.alias_table ? AliasTable::load(*config.alias_table) : AliasTable{};
  std::vector<UnresolvedAddress> unresolved;
  std::vector<std::set<CityKey>> cities;
  cities.reserve(records.size());
  for (const auto& rec : records) cities.push_back(record_cities(rec, aliases, &unresolved));
  summary.unresolved_addresses = unresolved.size();
  const CityOccurrenceTally occurrences = tally(cities);
  summary.cities_total = occurrences.papers.size();

  const auto grouping = config.grouping();
  auto assignments = assign_percentiles(records, grouping);
  flag_top(assignments, config.top_percent);
  const auto thresholds = year_thresholds(records, assignments);

  // Totals for the tests run over every city; the size and top-count
  // thresholds only decide what is presented.
  const auto topk = city_topk_stats(occurrences, assignments, config.top_percent);
  const auto impact =
      config.mode == MapMode::topk ? std::vector<CityImpactStats>{} : city_impact_stats(occurrences, assignments);

  Gazetteer gazetteer;
  if (config.geocoder.gazetteer) gazetteer = Gazetteer::load(*config.geocoder.gazetteer, GeoSource::gazetteer);
  Gazetteer cache;
  if (config.geocoder.cache) cache = Gazetteer::load(*config.geocoder.cache, GeoSource::cache, true);
  std::optional<RemoteGeocoder> remote;
  if (config.geocoder.remote) remote.emplace(config.geocoder.remote_config);
  Geocoder geocoder(std::move(gazetteer), std::move(cache), remote ? &*remote : nullptr);

  std::vector<std::string> diagnostics;
  for (const auto& p : parsed) {
    diagnostics.push_back(fmt::format("encoding\t{}\t{}", p.source, to_string(p.encoding)));
    for (const auto& d : p.diagnostics) {
      diagnostics.push_back(fmt::format("parse\t{}:{}\t{}", d.source, d.line, d.message));
    }
  }
  for (const auto& id : merged.duplicate_ids) diagnostics.push_back("duplicate\t" + id);
  for (const auto* rec : filtered.invalid) {
    diagnostics.push_back(fmt::format("invalid-record\t{}\t{}", rec->accession_id.empty() ? "-" : rec->accession_id,
                                      rec->pub_year ? "missing TC" : "missing PY"));
  }

  std::vector<MapNode> nodes;
  std::vector<CityImpactStats> presented_impact;
  const auto impact_mode = config.mode == MapMode::ri3r ? ImpactMode::ri3r : ImpactMode::i3;
  for (std::size_t i = 0; i < topk.size(); ++i) {
    const auto& s = topk[i];
    const auto name = s.city.render();
    if (s.n < config.min_city_size) {
      diagnostics.push_back(fmt::format("below-min-size\t{}\tn={}", name, s.n));
      continue;
    }
    if (s.observed < config.min_top) {
      diagnostics.push_back(fmt::format("below-min-top\t{}\ttop={}", name, s.observed));
      continue;
    }
    const auto location = geocoder.resolve(s.city);
    if (!location) {
      ++summary.cities_unlocated;
      diagnostics.push_back("unlocated\t" + name);
    }
    if (config.mode == MapMode::topk) {
      nodes.push_back(make_node(s, location));
    } else {
      nodes.push_back(make_node(impact[i], impact_mode, location));
      presented_impact.push_back(impact[i]);
    }
  }
  summary.cities_presented = nodes.size();
  if (summary.cities_unlocated > 0) {
    summary.warnings.push_back(fmt::format("{} cities could not be geocoded", summary.cities_unlocated));
  }
  if (summary.unresolved_addresses > 0) {
    summary.warnings.push_back(fmt::format("{} address segments could not be resolved to a city",
                                           summary.unresolved_addresses));
  }

  OutputDir out(config.out_dir, summary);
  out.write("ztest.txt", [&](std::ostream& os) { emit_ztest(os, nodes); });
  out.write("py.txt", [&](std::ostream& os) { write_py_txt(os, thresholds); });
  if (config.mode == MapMode::topk) {
    out.write("ucities.csv", [&](std::ostream& os) { write_ucities_csv(os, nodes); });
  } else {
    out.write("ui3.csv", [&](std::ostream& os) { write_ui3_csv(os, presented_impact, nodes); });
    out.write("i3so.csv",
              [&](std::ostream& os) { write_aggregate_csv(os, "journal", aggregate_by_journal(records, assignments)); });
    out.write("i3cntry.csv",
              [&](std::ostream& os) { write_aggregate_csv(os, "country", aggregate_by_country(cities, assignments)); });
  }
  out.write("map.geojson", [&](std::ostream& os) { emit_geojson(os, nodes); });
  const std::string title = config.mode == MapMode::topk
                                ? fmt::format("Top-{}% papers per city: observed vs expected", fixed(config.top_percent, 0))
                                : fmt::format("Integrated impact per city ({})", to_string(config.mode));
  out.write("map.html", [&](std::ostream& os) { emit_html(os, nodes, title); });
  out.write("unresolved_addresses.txt", [&](std::ostream& os) {
    for (const auto& u : unresolved) os << (u.accession_id.empty() ? "-" : u.accession_id) << '\t' << u.address << '\n';
  });
  out.write("geocode_errors.txt", [&](std::ostream& os) {
    for (const auto& e : geocoder.errors()) os << e << '\n';
  });
  out.write("diagnostics.txt", [&](std::ostream& os) {
    for (const auto& d : diagnostics) os << d << '\n';
  });

  if (config.geocoder.cache && geocoder.cache_modified()) geocoder.cache().save(*config.geocoder.cache);

  std::size_t top_papers = 0;
  for (const auto& a : assignments) top_papers += a.top ? 1 : 0;

  nlohmann::ordered_json manifest;
  auto& cfg = manifest["config"];
  cfg["inputs"] = nlohmann::json::array();
  for (const auto& p : config.inputs) cfg["inputs"].push_back(p.generic_string());
  cfg["doc_types"] = config.filter.doc_types;
  cfg["years"] = {config.filter.min_year, config.filter.max_year};
  cfg["top_percent"] = config.top_percent;
  cfg["min_city_size"] = config.min_city_size;
  cfg["min_top"] = config.min_top;
  cfg["mode"] = to_string(config.mode);
  cfg["group_by"] = to_string(grouping.group_by);
  cfg["scope"] = to_string(grouping.scope);
  cfg["alias_table"] = config.alias_table ? config.alias_table->generic_string() : "";
  cfg["gazetteer"] = config.geocoder.gazetteer ? config.geocoder.gazetteer->generic_string() : "";
  cfg["geocode_cache"] = config.geocoder.cache ? config.geocoder.cache->generic_string() : "";
  cfg["remote_geocode"] = config.geocoder.remote;
  auto& counts = manifest["counts"];
  counts["files"] = parsed.size();
  counts["records_parsed"] = summary.records_parsed;
  counts["skipped_blocks"] = summary.skipped_blocks;
  counts["duplicates_removed"] = summary.duplicates;
  counts["records_merged"] = merged.records.size();
  counts["invalid_records"] = summary.invalid_records;
  counts["filtered_out"] = summary.filtered_out;
  counts["papers_analyzed"] = summary.papers_analyzed;
  counts["top_papers"] = top_papers;
  counts["city_occurrences"] = occurrences.total_occurrences;
  counts["cities_total"] = summary.cities_total;
  counts["cities_presented"] = summary.cities_presented;
  counts["cities_unlocated"] = summary.cities_unlocated;
  counts["unresolved_addresses"] = summary.unresolved_addresses;
  counts["diagnostics"] = diagnostics.size();
  out.write("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });

  return summary;
}

}  // namespace citymap
