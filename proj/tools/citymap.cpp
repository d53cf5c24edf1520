// citymap: maps cities whose output of highly cited papers, or integrated
// citation impact, departs from expectation.

#include <glob.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "citymap/pipeline.hpp"

namespace {

constexpr const char* kApiKeyEnv = "CITYMAP_GEOCODER_KEY";

std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& patterns) {
  std::vector<std::filesystem::path> out;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    } else {
      // No match: keep the literal so the read error names it.
      out.emplace_back(pattern);
    }
    ::globfree(&g);
  }
  return out;
}

std::pair<int, int> parse_years(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--years", "expected FROM:TO, e.g. 1989:2009");
  try {
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--years", "expected FROM:TO, e.g. 1989:2009");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maps cities with above- or below-expectation citation performance from WoS tagged exports"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline and write map and table files");

  std::vector<std::string> input_patterns;
  std::vector<std::string> doc_types{"Article"};
  std::string years = "1989:2009";
  citymap::RunConfig config;
  std::string mode = "topk";
  std::string group_by;
  std::string scope;
  std::string gazetteer;
  std::string cache;
  std::string alias_table;
  std::string geocode_url;
  int interval_ms = 1000;
  std::string out_dir = "out";

  run_cmd->add_option("--input", input_patterns, "Tagged export file or glob (repeatable)")->required();
  run_cmd->add_option("--doc-type", doc_types, "Document type to keep (repeatable)")->capture_default_str();
  run_cmd->add_option("--years", years, "Publication year range FROM:TO")->capture_default_str();
  run_cmd->add_option("--top-percent", config.top_percent, "Top-k% threshold")->capture_default_str();
  run_cmd->add_option("--min-city-size", config.min_city_size, "Minimum papers for a city to be shown")
      ->capture_default_str();
  run_cmd->add_option("--min-top", config.min_top, "Minimum top papers for a city to be shown")
      ->capture_default_str();
  run_cmd->add_option("--mode", mode, "topk, i3 or ri3r")
      ->check(CLI::IsMember({"topk", "i3", "ri3r"}))
      ->capture_default_str();
  run_cmd->add_option("--group-by", group_by, "Reference sets: year or year-doctype")
      ->check(CLI::IsMember({"year", "year-doctype"}));
  run_cmd->add_option("--scope", scope, "Percentiles over the whole field or per journal")
      ->check(CLI::IsMember({"field", "journal"}));
  run_cmd->add_option("--alias-table", alias_table, "CSV variant,canonical city spellings");
  run_cmd->add_option("--gazetteer", gazetteer, "Gazetteer CSV (city_key,lat,lon)");
  run_cmd->add_option("--geocode-cache", cache, "Geocode cache CSV, created if missing");
  run_cmd->add_flag("--remote-geocode", config.geocoder.remote, "Query the remote geocoder for unknown cities");
  run_cmd->add_option("--geocode-url", geocode_url,
                      "URL template with {city} {region} {country} {query} {key} placeholders");
  run_cmd->add_option("--geocode-interval-ms", interval_ms, "Minimum spacing between remote requests")
      ->capture_default_str();
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    config.inputs = expand_inputs(input_patterns);
    config.filter.doc_types = {doc_types.begin(), doc_types.end()};
    std::tie(config.filter.min_year, config.filter.max_year) = parse_years(years);
    config.mode = *citymap::parse_map_mode(mode);
    if (!group_by.empty()) {
      config.group_by = group_by == "year" ? citymap::GroupBy::year : citymap::GroupBy::year_and_doctype;
    }
    if (!scope.empty()) config.scope = scope == "field" ? citymap::Scope::field : citymap::Scope::journal;
    if (!alias_table.empty()) config.alias_table = alias_table;
    if (!gazetteer.empty()) {
      config.geocoder.gazetteer = gazetteer;
    } else if (const std::filesystem::path bundled = std::filesystem::path(CITYMAP_DATA_DIR) / "gazetteer.csv";
               std::filesystem::exists(bundled)) {
      config.geocoder.gazetteer = bundled;
    }
    if (!cache.empty()) config.geocoder.cache = cache;
    if (config.geocoder.remote) {
      if (geocode_url.empty()) throw CLI::ValidationError("--remote-geocode", "requires --geocode-url");
      config.geocoder.remote_config.url_template = geocode_url;
      if (const char* key = std::getenv(kApiKeyEnv)) config.geocoder.remote_config.api_key = key;
      config.geocoder.remote_config.min_interval = std::chrono::milliseconds(interval_ms);
    }
    config.out_dir = out_dir;

    const auto summary = citymap::run(config);
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "papers analyzed: " << summary.papers_analyzed << " (parsed " << summary.records_parsed
              << ", duplicates " << summary.duplicates << ", invalid " << summary.invalid_records << ", filtered "
              << summary.filtered_out << ")\n"
              << "cities: " << summary.cities_total << " total, " << summary.cities_presented << " presented, "
              << summary.cities_unlocated << " without coordinates\n";
    for (const auto& p : summary.outputs) std::cout << "wrote " << p.string() << '\n';
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const citymap::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
