#include "citymap/city.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "citymap/csv.hpp"
#include "citymap/text.hpp"

namespace citymap {

namespace {

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool is_two_letter_code(std::string_view w) {
  return w.size() == 2 && std::isupper(static_cast<unsigned char>(w[0])) &&
         std::isupper(static_cast<unsigned char>(w[1]));
}

// Drops postal-code words: anything containing a digit, plus a two-letter
// suffix directly after a numeric code (Dutch "1012 CX").
std::string strip_postal(std::string_view token) {
  std::string out;
  bool after_code = false;
  for (const auto w : words(token)) {
    if (contains_digit(w)) {
      after_code = true;
      continue;
    }
    if (after_code && is_two_letter_code(w)) {
      after_code = false;
      continue;
    }
    after_code = false;
    if (!out.empty()) out += ' ';
    out += w;
  }
  return to_upper(out);
}

}  // namespace

std::string CityKey::render() const {
  return region.empty() ? city + ", " + country : city + ", " + region + ", " + country;
}

std::optional<CityKey> CityKey::parse_rendered(std::string_view text) {
  const auto parts = split_trimmed(text, ',');
  for (const auto& p : parts)
    if (p.empty()) return std::nullopt;
  if (parts.size() == 2) return CityKey{to_upper(parts[0]), "", to_upper(parts[1])};
  if (parts.size() == 3) return CityKey{to_upper(parts[0]), to_upper(parts[1]), to_upper(parts[2])};
  return std::nullopt;
}

std::optional<CityKey> normalize_address(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.starts_with('[')) {
    const auto close = s.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    s = trim(s.substr(close + 1));
  }
  while (!s.empty() && (s.back() == '.' || std::isspace(static_cast<unsigned char>(s.back())))) {
    s.remove_suffix(1);
  }

  std::vector<std::string> tokens;
  for (auto& t : split_trimmed(s, ','))
    if (!t.empty()) tokens.push_back(std::move(t));
  if (tokens.size() < 2) return std::nullopt;

  CityKey key;
  std::ptrdiff_t city_idx = static_cast<std::ptrdiff_t>(tokens.size()) - 2;
  const auto last_words = words(tokens.back());
  const bool us_tail = !last_words.empty() && to_upper(last_words.back()) == "USA";

  if (us_tail && last_words.size() > 1) {
    // "PA 19104 USA"
    key.country = "USA";
    if (is_two_letter_code(last_words.front())) key.region = std::string(last_words.front());
  } else if (us_tail) {
    key.country = "USA";
    const auto prev = words(tokens[tokens.size() - 2]);
    bool state_token = !prev.empty() && is_two_letter_code(prev.front());
    for (std::size_t i = 1; state_token && i < prev.size(); ++i) state_token = contains_digit(prev[i]);
    if (state_token) {
      key.region = std::string(prev.front());
      city_idx -= 1;
    }
  } else {
    key.country = strip_postal(tokens.back());
  }
  if (key.country.empty() || city_idx < 0) return std::nullopt;

  const auto& city_token = tokens[static_cast<std::size_t>(city_idx)];
  key.city = strip_postal(city_token);
  const auto city_words = words(city_token);
  const bool province_code = key.country != "USA" && key.city.size() == 2 && !city_words.empty() &&
                             is_two_letter_code(city_words.front());
  if (city_idx > 0 && (key.city.empty() || province_code)) {
    // Province code in front of the country ("Montreal, PQ H3C 3J7, Canada").
    key.city = strip_postal(tokens[static_cast<std::size_t>(city_idx - 1)]);
  }
  if (key.city.empty()) return std::nullopt;
  return key;
}

AliasTable AliasTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read alias table: " + path.string());
  return read(in);
}

AliasTable AliasTable::read(std::istream& in) {
  AliasTable table;
  const auto rows = csv::read(in);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && r.size() >= 2 && r[0] == "variant" && r[1] == "canonical") continue;
    if (r.size() != 2) throw std::runtime_error("alias table row " + std::to_string(i + 1) + ": expected 2 fields");
    const auto variant = CityKey::parse_rendered(r[0]);
    const auto canonical = CityKey::parse_rendered(r[1]);
    if (!variant || !canonical) {
      throw std::runtime_error("alias table row " + std::to_string(i + 1) + ": invalid city key");
    }
    table.add(*variant, *canonical);
  }
  return table;
}

void AliasTable::add(const CityKey& variant, const CityKey& canonical) { aliases_[variant] = canonical; }

CityKey AliasTable::apply(const CityKey& key) const {
  const auto it = aliases_.find(key);
  return it == aliases_.end() ? key : it->second;
}

std::set<CityKey> record_cities(const PublicationRecord& record, const AliasTable& aliases,
                                std::vector<UnresolvedAddress>* unresolved) {
  std::set<CityKey> out;
  for (const auto& address : record.addresses) {
    if (auto key = normalize_address(address)) {
      out.insert(aliases.apply(*key));
    } else if (unresolved != nullptr) {
      unresolved->push_back({record.accession_id, address});
    }
  }
  return out;
}

std::size_t CityOccurrenceTally::n(const CityKey& key) const {
  const auto it = papers.find(key);
  return it == papers.end() ? 0 : it->second.size();
}

CityOccurrenceTally tally(std::span<const std::set<CityKey>> cities_per_record) {
  CityOccurrenceTally t;
  for (std::size_t i = 0; i < cities_per_record.size(); ++i) {
    for (const auto& city : cities_per_record[i]) {
      t.papers[city].push_back(i);
      ++t.total_occurrences;
    }
  }
  return t;
}

CityOccurrenceTally tally(std::span<const PublicationRecord> records, const AliasTable& aliases,
                          std::vector<UnresolvedAddress>* unresolved) {
  std::vector<std::set<CityKey>> per_record;
  per_record.reserve(records.size());
  for (const auto& rec : records) per_record.push_back(record_cities(rec, aliases, unresolved));
  return tally(per_record);
}

}  // namespace citymap
