#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citymap/city.hpp"
#include "citymap/percentile.hpp"

namespace citymap {

struct ZScore {
  double value = 0.0;
  bool degenerate = false;  // pooled proportion was 0 or 1; value forced to 0
};

/// Pooled z test for two independent proportions s1/n1 and s2/n2. Positive
/// when the first proportion is larger. Successes may be real-valued.
/// Throws std::invalid_argument unless n1 > 0, n2 > 0, 0 <= s1 <= n1 and
/// 0 <= s2 <= n2.
ZScore two_proportion_z(double s1, double n1, double s2, double n2);

enum class Significance { not_computed, ns, p05, p01, p001 };

inline constexpr double kZ05 = 1.96;
inline constexpr double kZ01 = 2.5758;
inline constexpr double kZ001 = 3.2905;

/// Two-sided band of |z|. A test whose expected value is below five is not
/// legitimate and reports not_computed.
Significance significance(double z, bool expected_ok);

/// "***", "**", "*" or "".
std::string_view stars(Significance sig);
std::string_view to_string(Significance sig);

inline constexpr double kMinExpectedForTest = 5.0;

struct CityTopKStats {
  CityKey city;
  int n = 0;
  int observed = 0;
  double expected = 0.0;
  double z = 0.0;
  Significance sig = Significance::not_computed;
};

/// Observed vs expected top-k% papers per city. Each city is tested against
/// the rest of all city occurrences. `assignments` must be indexed by the
/// same record positions as `tally`.
std::vector<CityTopKStats> city_topk_stats(const CityOccurrenceTally& tally,
                                           std::span<const PercentileAssignment> assignments, double k);

/// Integrated impact: the sum of percentile values.
double i3_of(std::span<const double> percentiles);

struct CityImpactStats {
  CityKey city;
  int n = 0;
  double i3_observed = 0.0;
  double i3_expected = 0.0;
  double ri3r_observed = 0.0;
  double ri3r_expected = 0.0;
  double z_i3 = 0.0;
  double z_ri3r = 0.0;
  Significance sig_i3 = Significance::not_computed;
  Significance sig_ri3r = Significance::not_computed;
};

/// I3 and impact-per-paper statistics for every tallied city. Totals are
/// occurrence weighted: a paper adds its full percentile to each of its
/// cities. Callers apply the minimum city size when presenting results.
std::vector<CityImpactStats> city_impact_stats(const CityOccurrenceTally& tally,
                                               std::span<const PercentileAssignment> assignments);

struct ImpactAggregate {
  std::string key;
  int n = 0;
  double i3 = 0.0;
};

/// I3 summed per journal.
std::vector<ImpactAggregate> aggregate_by_journal(std::span<const PublicationRecord> records,
                                                  std::span<const PercentileAssignment> assignments);

/// I3 summed per country, integer counted over the distinct countries of
/// each paper's cities.
std::vector<ImpactAggregate> aggregate_by_country(std::span<const std::set<CityKey>> cities_per_record,
                                                  std::span<const PercentileAssignment> assignments);

}  // namespace citymap
