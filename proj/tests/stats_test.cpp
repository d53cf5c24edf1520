#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <random>

#include "citymap/stats.hpp"
#include "test_support.hpp"

namespace citymap {
namespace {

using testing::make_record;
using Big = boost::multiprecision::cpp_dec_float_50;

double reference_z(double s1, double n1, double s2, double n2) {
  const Big bs1(s1), bn1(n1), bs2(s2), bn2(n2);
  const Big pooled = (bs1 + bs2) / (bn1 + bn2);
  const Big z = (bs1 / bn1 - bs2 / bn2) / sqrt(pooled * (1 - pooled) * (1 / bn1 + 1 / bn2));
  return z.convert_to<double>();
}

TEST(TwoProportionZ, EqualProportionsGiveZero) {
  EXPECT_EQ(two_proportion_z(5, 50, 20, 200).value, 0.0);
  EXPECT_EQ(two_proportion_z(0.5, 5, 1.5, 15).value, 0.0);
}

TEST(TwoProportionZ, SwappingNegates) {
  const auto a = two_proportion_z(46, 179, 578, 6063).value;
  const auto b = two_proportion_z(578, 6063, 46, 179).value;
  EXPECT_EQ(a, -b);
  EXPECT_GT(a, 0.0);
}

TEST(TwoProportionZ, BudapestLikeInput) {
  // 50-digit evaluation of the pooled formula.
  EXPECT_NEAR(two_proportion_z(46, 179, 578, 6063).value, 7.1060316420774, 1e-12);
}

TEST(TwoProportionZ, DegeneratePoolGivesZero) {
  const auto all = two_proportion_z(10, 10, 5, 5);
  EXPECT_TRUE(all.degenerate);
  EXPECT_EQ(all.value, 0.0);
  const auto none = two_proportion_z(0, 10, 0, 5);
  EXPECT_TRUE(none.degenerate);
  EXPECT_EQ(none.value, 0.0);
}

TEST(TwoProportionZ, RejectsInvalidInput) {
  EXPECT_THROW(two_proportion_z(1, 0, 1, 2), std::invalid_argument);
  EXPECT_THROW(two_proportion_z(3, 2, 1, 2), std::invalid_argument);
  EXPECT_THROW(two_proportion_z(-1, 2, 1, 2), std::invalid_argument);
}

TEST(TwoProportionZ, MatchesHighPrecisionReference) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const double n1 = 1 + static_cast<double>(rng() % 10000);
    const double n2 = 1 + static_cast<double>(rng() % 10000);
    const double s1 = static_cast<double>(rng() % (static_cast<std::uint64_t>(n1) + 1));
    const double s2 = static_cast<double>(rng() % (static_cast<std::uint64_t>(n2) + 1));
    const auto z = two_proportion_z(s1, n1, s2, n2);
    if (z.degenerate) continue;
    EXPECT_NEAR(z.value, reference_z(s1, n1, s2, n2), 1e-10);
    EXPECT_EQ(z.value == 0.0, s1 * n2 == s2 * n1);
  }
}

TEST(Significance, Bands) {
  EXPECT_EQ(significance(1.97, true), Significance::p05);
  EXPECT_EQ(stars(significance(1.97, true)), "*");
  EXPECT_EQ(significance(-2.60, true), Significance::p01);
  EXPECT_EQ(significance(3.3, true), Significance::p001);
  EXPECT_EQ(stars(Significance::p001), "***");
  EXPECT_EQ(significance(0, true), Significance::ns);
  EXPECT_EQ(significance(1.96, true), Significance::ns);
  EXPECT_EQ(significance(10, false), Significance::not_computed);
  EXPECT_EQ(stars(Significance::not_computed), "");
}

TEST(Significance, ThresholdsAreNormalQuantiles) {
  // Two-sided 1% and 0.1% critical values.
  EXPECT_NEAR(kZ01, 2.5758293035489, 1e-4);
  EXPECT_NEAR(kZ001, 3.2905267314919, 1e-4);
}

TEST(Significance, BandsAreNested) {
  for (int i = -5000; i <= 5000; ++i) {
    const double z = i / 1000.0;
    const auto s = significance(z, true);
    const double a = std::fabs(z);
    EXPECT_EQ(s == Significance::p001, a > kZ001);
    EXPECT_EQ(s == Significance::p01 || s == Significance::p001, a > kZ01);
    EXPECT_EQ(s != Significance::ns, a > kZ05);
  }
}

CityOccurrenceTally tally_of(const std::vector<std::vector<CityKey>>& cities) {
  std::vector<std::set<CityKey>> sets;
  for (const auto& c : cities) sets.emplace_back(c.begin(), c.end());
  return tally(sets);
}

std::vector<PercentileAssignment> assignments_with(const std::vector<double>& percentiles, const std::vector<bool>& top) {
  std::vector<PercentileAssignment> out(percentiles.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].record = i;
    out[i].percentile = percentiles[i];
    out[i].top = top[i];
  }
  return out;
}

TEST(CityTopKStats, ExpectedIsNominalShare) {
  const CityKey budapest{"BUDAPEST", "", "HUNGARY"};
  const CityKey philly{"PHILADELPHIA", "PA", "USA"};
  const CityKey other{"OTHER", "", "X"};
  std::vector<std::vector<CityKey>> cities;
  std::vector<bool> top;
  for (int i = 0; i < 179; ++i) {
    cities.push_back({budapest});
    top.push_back(i < 46);
  }
  for (int i = 0; i < 99; ++i) {
    cities.push_back({philly});
    top.push_back(i < 24);
  }
  for (int i = 0; i < 1000; ++i) {
    cities.push_back({other});
    top.push_back(i < 60);
  }
  const auto stats =
      city_topk_stats(tally_of(cities), assignments_with(std::vector<double>(top.size(), 50.0), top), 10);
  ASSERT_EQ(stats.size(), 3u);
  const auto& b = stats[0];
  EXPECT_EQ(b.city, budapest);
  EXPECT_EQ(b.n, 179);
  EXPECT_EQ(b.observed, 46);
  EXPECT_EQ(b.expected, 17.9);
  const auto& p = stats[2];
  EXPECT_EQ(p.city, philly);
  EXPECT_EQ(p.expected, 9.9);
  EXPECT_EQ(p.z, two_proportion_z(24, 99, 46 + 60, 179 + 1000).value);
}

TEST(CityTopKStats, EqualProportionsGiveZeroAndSmallCitiesNotComputed) {
  const CityKey a{"A", "", "X"};
  const CityKey b{"B", "", "X"};
  std::vector<std::vector<CityKey>> cities;
  std::vector<bool> top;
  for (int i = 0; i < 100; ++i) {
    cities.push_back({a});
    top.push_back(i < 10);
  }
  for (int i = 0; i < 30; ++i) {
    cities.push_back({b});
    top.push_back(i < 3);
  }
  const auto stats =
      city_topk_stats(tally_of(cities), assignments_with(std::vector<double>(top.size(), 50.0), top), 10);
  EXPECT_EQ(stats[0].z, 0.0);
  EXPECT_EQ(stats[0].expected, 10.0);
  EXPECT_EQ(stats[0].sig, Significance::ns);
  EXPECT_EQ(stats[1].expected, 3.0);
  EXPECT_EQ(stats[1].sig, Significance::not_computed);
}

TEST(CityTopKStats, InvariantsOnRandomCorpora) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<CityKey>> cities;
    std::vector<bool> top;
    for (int i = 0; i < 800; ++i) {
      std::vector<CityKey> c;
      const int k = 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < k; ++j) c.push_back(CityKey{"C" + std::to_string(rng() % 40), "", "X"});
      cities.push_back(c);
      top.push_back(rng() % 10 == 0);
    }
    const auto t = tally_of(cities);
    const auto stats = city_topk_stats(t, assignments_with(std::vector<double>(top.size(), 50.0), top), 10);
    double sum_expected = 0;
    double sum_n = 0;
    for (const auto& s : stats) {
      EXPECT_LE(s.observed, s.n);
      EXPECT_GE(s.observed, 0);
      EXPECT_EQ(s.sig == Significance::not_computed, s.expected < 5);
      sum_expected += s.expected;
      sum_n += s.n;
    }
    EXPECT_NEAR(sum_expected, 0.1 * sum_n, 1e-9 * sum_n);
  }
}

TEST(I3, SumOfPercentiles) {
  EXPECT_EQ(i3_of(std::vector<double>{100}), 100);
  EXPECT_EQ(i3_of(std::vector<double>{50, 100}), 150);
  EXPECT_EQ(i3_of(std::vector<double>{}), 0);
}

TEST(I3, EqualsFrequencyWeightedForm) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> values;
    const int n = static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) values.push_back(static_cast<double>(1 + rng() % 20) * 5.0);  // multiples of 5
    std::map<double, int> histogram;
    for (const double v : values) ++histogram[v];
    double weighted = 0;
    for (const auto& [x, f] : histogram) weighted += x * f;
    EXPECT_EQ(i3_of(values), weighted);
  }
}

TEST(CityImpactStats, SingleCityHoldsEverything) {
  const CityKey a{"A", "", "X"};
  const auto stats =
      city_impact_stats(tally_of({{a}, {a}, {a}}), assignments_with({100, 50, 100.0 / 3}, {true, false, false}));
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_DOUBLE_EQ(stats[0].i3_observed, stats[0].i3_expected);
  EXPECT_EQ(stats[0].z_i3, 0.0);
  EXPECT_EQ(stats[0].z_ri3r, 0.0);
}

TEST(CityImpactStats, FormulaSubstitution) {
  // City A: two papers {50, 100}; the rest make sum(I3) = 1000 over 20 papers.
  const CityKey a{"A", "", "X"};
  const CityKey b{"B", "", "X"};
  std::vector<std::vector<CityKey>> cities{{a}, {a}};
  std::vector<double> pct{50, 100};
  for (int i = 0; i < 18; ++i) {
    cities.push_back({b});
    pct.push_back(850.0 / 18);
  }
  const auto stats = city_impact_stats(tally_of(cities), assignments_with(pct, std::vector<bool>(pct.size())));
  const auto& s = stats[0];
  EXPECT_EQ(s.n, 2);
  EXPECT_DOUBLE_EQ(s.i3_observed, 150);
  EXPECT_DOUBLE_EQ(s.i3_expected, 100);
  EXPECT_DOUBLE_EQ(s.ri3r_observed, 75);
  EXPECT_DOUBLE_EQ(s.ri3r_expected, 50);
  EXPECT_NEAR(s.z_i3, two_proportion_z(150, 1000, 2, 20).value, 1e-12);
  EXPECT_DOUBLE_EQ(s.z_ri3r, two_proportion_z(1.5, 2, 8.5, 18).value);
  EXPECT_GT(s.z_i3, 0);
  EXPECT_GT(s.z_ri3r, 0);
}

TEST(CityImpactStats, EmptyTallyGivesNoRows) {
  EXPECT_TRUE(city_impact_stats(CityOccurrenceTally{}, {}).empty());
}

TEST(CityImpactStats, ExpectedConservesTotalOnFiftyCities) {
  std::mt19937 rng(50);
  std::vector<std::vector<CityKey>> cities;
  std::vector<double> pct;
  for (int i = 0; i < 3000; ++i) {
    std::vector<CityKey> c;
    const int k = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < k; ++j) c.push_back(CityKey{"C" + std::to_string(rng() % 50), "", "X"});
    cities.push_back(c);
    pct.push_back(static_cast<double>(1 + rng() % 1000) / 10.0);
  }
  const auto t = tally_of(cities);
  const auto stats = city_impact_stats(t, assignments_with(pct, std::vector<bool>(pct.size())));
  ASSERT_EQ(stats.size(), 50u);
  double total_i3 = 0;
  for (std::size_t i = 0; i < pct.size(); ++i) total_i3 += pct[i] * static_cast<double>(std::set<CityKey>(cities[i].begin(), cities[i].end()).size());
  double sum_expected = 0;
  for (const auto& s : stats) {
    sum_expected += s.i3_expected;
    EXPECT_LE(s.i3_observed, 100.0 * s.n);
    EXPECT_GE(s.i3_observed, 0.0);
  }
  EXPECT_NEAR(sum_expected, total_i3, 1e-9 * total_i3);
}

TEST(Aggregates, JournalAndCountry) {
  const std::vector<PublicationRecord> recs{make_record("a", 2000, 1, {}, "Article", "J1"),
                                            make_record("b", 2000, 1, {}, "Article", "J2"),
                                            make_record("c", 2000, 1, {}, "Article", "J1")};
  const auto a = assignments_with({10, 20, 30}, {false, false, false});
  const auto journals = aggregate_by_journal(recs, a);
  ASSERT_EQ(journals.size(), 2u);
  EXPECT_EQ(journals[0].key, "J1");
  EXPECT_EQ(journals[0].n, 2);
  EXPECT_EQ(journals[0].i3, 40);
  const std::vector<std::set<CityKey>> cities{
      {CityKey{"LEIDEN", "", "NETHERLANDS"}, CityKey{"AMSTERDAM", "", "NETHERLANDS"}},
      {CityKey{"BUDAPEST", "", "HUNGARY"}, CityKey{"LEIDEN", "", "NETHERLANDS"}},
      {}};
  const auto countries = aggregate_by_country(cities, a);
  ASSERT_EQ(countries.size(), 2u);
  EXPECT_EQ(countries[0].key, "HUNGARY");
  EXPECT_EQ(countries[0].i3, 20);
  EXPECT_EQ(countries[1].key, "NETHERLANDS");
  EXPECT_EQ(countries[1].n, 2);
  EXPECT_EQ(countries[1].i3, 30);
}

}  // namespace
}  // namespace citymap
