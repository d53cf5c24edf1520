#include "citymap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace citymap {

ZScore two_proportion_z(double s1, double n1, double s2, double n2) {
  if (!(n1 > 0.0 && n2 > 0.0 && s1 >= 0.0 && s2 >= 0.0 && s1 <= n1 && s2 <= n2)) {
    throw std::invalid_argument("two_proportion_z: need n > 0 and 0 <= s <= n for both samples");
  }
  const double p1 = s1 / n1;
  const double p2 = s2 / n2;
  const double pooled = (s1 + s2) / (n1 + n2);
  const double variance = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2);
  if (!(variance > 0.0)) return {0.0, true};
  return {(p1 - p2) / std::sqrt(variance), false};
}

Significance significance(double z, bool expected_ok) {
  if (!expected_ok) return Significance::not_computed;
  const double a = std::fabs(z);
  if (a > kZ001) return Significance::p001;
  if (a > kZ01) return Significance::p01;
  if (a > kZ05) return Significance::p05;
  return Significance::ns;
}

std::string_view stars(Significance sig) {
  switch (sig) {
    case Significance::p001: return "***";
    case Significance::p01: return "**";
    case Significance::p05: return "*";
    default: return "";
  }
}

std::string_view to_string(Significance sig) {
  switch (sig) {
    case Significance::not_computed: return "not_computed";
    case Significance::ns: return "ns";
    case Significance::p05: return "p05";
    case Significance::p01: return "p01";
    case Significance::p001: return "p001";
  }
  return "unknown";
}

std::vector<CityTopKStats> city_topk_stats(const CityOccurrenceTally& tally,
                                           std::span<const PercentileAssignment> assignments, double k) {
  std::vector<CityTopKStats> out;
  out.reserve(tally.papers.size());
  double total_top = 0.0;
  for (const auto& [city, papers] : tally.papers) {
    CityTopKStats s;
    s.city = city;
    s.n = static_cast<int>(papers.size());
    for (const auto i : papers) s.observed += assignments[i].top ? 1 : 0;
    s.expected = k * s.n / 100.0;
    total_top += s.observed;
    out.push_back(std::move(s));
  }
  const auto total_n = static_cast<double>(tally.total_occurrences);
  for (auto& s : out) {
    const double rest_n = total_n - s.n;
    s.z = rest_n > 0.0 ? two_proportion_z(s.observed, s.n, total_top - s.observed, rest_n).value : 0.0;
    s.sig = significance(s.z, s.expected >= kMinExpectedForTest);
  }
  return out;
}

double i3_of(std::span<const double> percentiles) {
  double sum = 0.0;
  for (const double p : percentiles) sum += p;
  return sum;
}

std::vector<CityImpactStats> city_impact_stats(const CityOccurrenceTally& tally,
                                               std::span<const PercentileAssignment> assignments) {
  std::vector<CityImpactStats> out;
  if (tally.total_occurrences == 0) return out;
  out.reserve(tally.papers.size());
  double total_i3 = 0.0;
  std::vector<double> pct;
  for (const auto& [city, papers] : tally.papers) {
    pct.clear();
    for (const auto i : papers) pct.push_back(assignments[i].percentile);
    CityImpactStats s;
    s.city = city;
    s.n = static_cast<int>(papers.size());
    s.i3_observed = i3_of(pct);
    total_i3 += s.i3_observed;
    out.push_back(std::move(s));
  }
  const auto total_n = static_cast<double>(tally.total_occurrences);
  for (auto& s : out) {
    s.i3_expected = s.n / total_n * total_i3;
    s.ri3r_observed = s.i3_observed / s.n;
    s.ri3r_expected = total_i3 / total_n;
    // Share of total impact against share of total output.
    s.z_i3 = two_proportion_z(s.i3_observed, total_i3, s.n, total_n).value;
    const double rest_n = total_n - s.n;
    if (rest_n > 0.0) {
      // Mean percentile / 100 read as a success proportion over papers.
      const double s1 = std::min(s.i3_observed / 100.0, static_cast<double>(s.n));
      const double s2 = std::clamp((total_i3 - s.i3_observed) / 100.0, 0.0, rest_n);
      s.z_ri3r = two_proportion_z(s1, s.n, s2, rest_n).value;
    }
    s.sig_i3 = significance(s.z_i3, s.i3_expected >= kMinExpectedForTest);
    s.sig_ri3r = significance(s.z_ri3r, s.ri3r_expected >= kMinExpectedForTest);
  }
  return out;
}

std::vector<ImpactAggregate> aggregate_by_journal(std::span<const PublicationRecord> records,
                                                  std::span<const PercentileAssignment> assignments) {
  std::map<std::string, ImpactAggregate> acc;
  for (const auto& a : assignments) {
    auto& agg = acc[records[a.record].journal];
    agg.key = records[a.record].journal;
    ++agg.n;
    agg.i3 += a.percentile;
  }
  std::vector<ImpactAggregate> out;
  for (auto& [key, agg] : acc) out.push_back(std::move(agg));
  return out;
}

std::vector<ImpactAggregate> aggregate_by_country(std::span<const std::set<CityKey>> cities_per_record,
                                                  std::span<const PercentileAssignment> assignments) {
  std::map<std::string, ImpactAggregate> acc;
  for (const auto& a : assignments) {
    std::set<std::string> countries;
    for (const auto& c : cities_per_record[a.record]) countries.insert(c.country);
    for (const auto& country : countries) {
      auto& agg = acc[country];
      agg.key = country;
      ++agg.n;
      agg.i3 += a.percentile;
    }
  }
  std::vector<ImpactAggregate> out;
  for (auto& [key, agg] : acc) out.push_back(std::move(agg));
  return out;
}

}  // namespace citymap
