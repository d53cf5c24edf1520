#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citymap/wos_parser.hpp"

namespace citymap {

/// Normalized city identity. `region` is only set for US addresses, where it
/// holds the two-letter state code.
struct CityKey {
  std::string city;
  std::string region;
  std::string country;

  /// "CITY, REGION, COUNTRY" or "CITY, COUNTRY".
  std::string render() const;

  /// Inverse of render(). Returns nullopt unless the text has two or three
  /// non-empty comma-separated parts.
  static std::optional<CityKey> parse_rendered(std::string_view text);

  auto operator<=>(const CityKey&) const = default;
};

/// Extracts the city from one C1 address segment, e.g.
/// "Drexel Univ, Coll Informat Sci & Technol, Philadelphia, PA 19104 USA"
/// becomes PHILADELPHIA, PA, USA. Returns nullopt when the segment has fewer
/// than two comma-separated parts or no usable city token.
std::optional<CityKey> normalize_address(std::string_view raw);

/// Maps spelling variants onto a canonical CityKey. Loaded from a
/// `variant,canonical` CSV of rendered keys.
class AliasTable {
 public:
  AliasTable() = default;

  static AliasTable load(const std::filesystem::path& path);
  static AliasTable read(std::istream& in);

  void add(const CityKey& variant, const CityKey& canonical);
  CityKey apply(const CityKey& key) const;
  std::size_t size() const { return aliases_.size(); }

 private:
  std::map<CityKey, CityKey> aliases_;
};

struct UnresolvedAddress {
  std::string accession_id;
  std::string address;
};

/// Distinct cities on one paper. Unresolvable segments are appended to
/// `unresolved` when it is given.
std::set<CityKey> record_cities(const PublicationRecord& record, const AliasTable& aliases = {},
                                std::vector<UnresolvedAddress>* unresolved = nullptr);

/// Integer-counting tally: every paper counts once for each distinct city on
/// its address list.
struct CityOccurrenceTally {
  /// Indices of the papers (into the tallied sequence) that list each city.
  std::map<CityKey, std::vector<std::size_t>> papers;
  std::size_t total_occurrences = 0;

  std::size_t n(const CityKey& key) const;
};

CityOccurrenceTally tally(std::span<const std::set<CityKey>> cities_per_record);
CityOccurrenceTally tally(std::span<const PublicationRecord> records, const AliasTable& aliases = {},
                          std::vector<UnresolvedAddress>* unresolved = nullptr);

}  // namespace citymap
