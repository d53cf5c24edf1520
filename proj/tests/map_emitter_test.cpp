#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "citymap/csv.hpp"
#include "citymap/map_emitter.hpp"
#include "json.hpp"

namespace citymap {
namespace {

CityTopKStats topk(const char* city, int n, int observed, double expected, double z, Significance sig) {
  return {CityKey{city, "", "X"}, n, observed, expected, z, sig};
}

TEST(StyleTopK, BudapestIsDarkGreen) {
  const auto style = style_topk({CityKey{"BUDAPEST", "", "HUNGARY"}, 179, 46, 17.9, 7.106, Significance::p001});
  EXPECT_EQ(style.color, NodeColor::dark_green);
  EXPECT_NEAR(style.size, 29.1, 1e-12);
  EXPECT_EQ(style.label, "observed: 46; expected: 17.9; z = 7.11***");
}

TEST(StyleTopK, EqualityIsGreyWithUnitRadius) {
  const auto style = style_topk(topk("A", 50, 5, 5.0, 0.0, Significance::ns));
  EXPECT_EQ(style.color, NodeColor::grey);
  EXPECT_EQ(style.size, 1.0);
}

TEST(StyleTopK, SmallExpectedIsLimeGreen) {
  const auto style = style_topk(topk("A", 5, 2, 0.5, 3.0, Significance::not_computed));
  EXPECT_EQ(style.color, NodeColor::lime_green);
  EXPECT_EQ(style.size, 2.5);
  EXPECT_EQ(style.label, "observed: 2; expected: 0.5; z = 3.00");
}

TEST(ClassifyColor, ExhaustiveDecisionTable) {
  const std::vector<Significance> sigs{Significance::not_computed, Significance::ns, Significance::p05,
                                       Significance::p01, Significance::p001};
  int cases = 0;
  for (const int sign : {-1, 0, 1}) {
    for (const double expected : {2.0, 4.99, 5.0, 12.0}) {
      for (const auto sig : sigs) {
        const double observed = expected + sign * 1.5;
        const bool legit = expected >= 5.0;
        const bool significant = sig == Significance::p05 || sig == Significance::p01 || sig == Significance::p001;
        NodeColor want;
        if (sign == 0) {
          want = NodeColor::grey;
        } else if (sign > 0) {
          want = !legit ? NodeColor::lime_green : significant ? NodeColor::dark_green : NodeColor::green;
        } else {
          want = !legit ? NodeColor::orange : significant ? NodeColor::red : NodeColor::orange_red;
        }
        EXPECT_EQ(classify_color(observed, expected, sig), want)
            << "sign=" << sign << " expected=" << expected << " sig=" << to_string(sig);
        ++cases;
      }
    }
  }
  EXPECT_EQ(cases, 60);
}

TEST(TopkRadius, AtLeastOneEqualOnlyOnEquality) {
  for (int o = 0; o <= 30; ++o) {
    for (int e10 = 0; e10 <= 300; e10 += 7) {
      const double e = e10 / 10.0;
      const double r = topk_radius(o, e);
      EXPECT_GE(r, 1.0);
      EXPECT_EQ(r == 1.0, o == e);
    }
  }
}

TEST(ImpactSize, LogOfNPlusOne) {
  EXPECT_NEAR(impact_size(1), 0.6931, 1e-4);
  EXPECT_NEAR(impact_size(179), 5.193, 1e-3);
  EXPECT_EQ(impact_size(0), 0.0);
}

TEST(StyleImpact, ModesPickMatchingFields) {
  CityImpactStats s;
  s.city = CityKey{"A", "", "X"};
  s.n = 10;
  s.i3_observed = 600;
  s.i3_expected = 500;
  s.z_i3 = 4.0;
  s.sig_i3 = Significance::p001;
  s.ri3r_observed = 60;
  s.ri3r_expected = 50;
  s.z_ri3r = 1.0;
  s.sig_ri3r = Significance::ns;
  const auto i3 = style_impact(s, ImpactMode::i3);
  EXPECT_EQ(i3.color, NodeColor::dark_green);
  EXPECT_DOUBLE_EQ(i3.size, std::log(11.0));
  EXPECT_EQ(i3.label, "observed: 600.0; expected: 500.0; z = 4.00***");
  const auto ri3r = style_impact(s, ImpactMode::ri3r);
  EXPECT_EQ(ri3r.color, NodeColor::green);
  EXPECT_EQ(ri3r.size, i3.size);
  s.i3_expected = s.i3_observed;
  EXPECT_EQ(style_impact(s, ImpactMode::i3).color, NodeColor::grey);
}

TEST(Fixed, NoNegativeZero) {
  EXPECT_EQ(fixed(-0.001, 2), "0.00");
  EXPECT_EQ(fixed(-0.0, 1), "0.0");
  EXPECT_EQ(fixed(-0.5, 1), "-0.5");
  EXPECT_EQ(fixed(17.9, 1), "17.9");
}

std::vector<MapNode> three_nodes() {
  return {
      make_node(topk("LEIDEN", 108, 36, 10.8, 6.5, Significance::p001), GeoPoint(52.1601, 4.497, GeoSource::gazetteer)),
      make_node(topk("SMALLTOWN", 6, 0, 0.6, -0.8, Significance::not_computed),
                GeoPoint(10, -20.25, GeoSource::cache)),
      make_node(topk("NOWHERE", 50, 5, 5.0, 0.0, Significance::ns), std::nullopt),
      make_node(topk("ZURICH", 56, 27, 5.6, 9.0, Significance::p001), GeoPoint(47.3769, 8.5417, GeoSource::gazetteer)),
  };
}

TEST(EmitZtest, EmptyInputIsHeaderOnly) {
  std::ostringstream out;
  emit_ztest(out, {});
  EXPECT_EQ(out.str(), "name,desc,latitude,longitude,color,n\n");
}

TEST(EmitZtest, HandBuiltGolden) {
  std::ostringstream out;
  std::vector<std::string> excluded;
  const auto nodes = three_nodes();
  emit_ztest(out, nodes, &excluded);
  EXPECT_EQ(out.str(),
            "name,desc,latitude,longitude,color,n\n"
            "\"LEIDEN, X\",observed: 36; expected: 10.8; z = 6.50***,52.1601,4.4970,darkgreen,26.20\n"
            "\"ZURICH, X\",observed: 27; expected: 5.6; z = 9.00***,47.3769,8.5417,darkgreen,22.40\n"
            "\"SMALLTOWN, X\",observed: 0; expected: 0.6; z = -0.80,10.0000,-20.2500,orange,1.60\n");
  EXPECT_EQ(excluded, std::vector<std::string>{"NOWHERE, X"});
  std::ostringstream again;
  emit_ztest(again, nodes);
  EXPECT_EQ(again.str(), out.str());
}

TEST(EmitZtest, ColorsAreAllowedNames) {
  const std::set<std::string> allowed{"darkgreen", "green", "limegreen", "red", "orangered", "orange", "gray"};
  for (int c = 0; c <= 6; ++c) EXPECT_TRUE(allowed.contains(std::string(web_color(static_cast<NodeColor>(c)))));
}

TEST(EmitGeojson, OneFeaturePerLocatedCity) {
  std::ostringstream out;
  const auto nodes = three_nodes();
  emit_geojson(out, std::span(nodes).subspan(0, 1));
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_EQ(doc["type"], "FeatureCollection");
  ASSERT_EQ(doc["features"].size(), 1u);
  const auto& f = doc["features"][0];
  EXPECT_EQ(f["type"], "Feature");
  EXPECT_EQ(f["geometry"]["type"], "Point");
  EXPECT_DOUBLE_EQ(f["geometry"]["coordinates"][0].get<double>(), 4.497);
  EXPECT_DOUBLE_EQ(f["geometry"]["coordinates"][1].get<double>(), 52.1601);
  const auto& p = f["properties"];
  EXPECT_EQ(p["name"], "LEIDEN, X");
  EXPECT_EQ(p["observed"].get<double>(), 36);
  EXPECT_EQ(p["expected"].get<double>(), 10.8);
  EXPECT_EQ(p["stars"], "***");
  EXPECT_EQ(p["color"], "darkgreen");
  EXPECT_DOUBLE_EQ(p["size"].get<double>(), 26.2);
}

TEST(EmitHtml, EmbedsFeaturesAndEscapes) {
  std::ostringstream out;
  auto nodes = three_nodes();
  nodes[0].name = "</script><b>";
  emit_html(out, nodes, "A & B");
  const auto html = out.str();
  EXPECT_NE(html.find("<title>A &amp; B</title>"), std::string::npos);
  EXPECT_NE(html.find("\"type\":\"FeatureCollection\""), std::string::npos);
  EXPECT_EQ(html.find("</script><b>"), std::string::npos);
  EXPECT_NE(html.find("ZURICH, X"), std::string::npos);
  EXPECT_EQ(html.find("NOWHERE"), std::string::npos);
}

TEST(WriteUcities, IncludesUnlocatedRows) {
  std::ostringstream out;
  write_ucities_csv(out, three_nodes());
  std::istringstream in(out.str());
  const auto rows = csv::read(in);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"city", "lat", "lon", "n", "observed", "expected", "z", "sig", "color",
                                               "radius"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"LEIDEN, X", "52.1601", "4.4970", "108", "36", "10.8000", "6.5000",
                                               "p001", "darkgreen", "26.2000"}));
  EXPECT_EQ(rows[4], (std::vector<std::string>{"NOWHERE, X", "", "", "50", "5", "5.0000", "0.0000", "ns", "gray",
                                               "1.0000"}));
}

TEST(WriteAggregate, Rows) {
  std::ostringstream out;
  const std::vector<ImpactAggregate> rows{{"J, ONE", 2, 150}, {"J2", 1, 33.333333}};
  write_aggregate_csv(out, "journal", rows);
  EXPECT_EQ(out.str(), "journal,n,i3\n\"J, ONE\",2,150.0000\nJ2,1,33.3333\n");
}

}  // namespace
}  // namespace citymap
