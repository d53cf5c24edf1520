#pragma once

// Styling of city statistics and the map/table writers built on it.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citymap/geocoder.hpp"
#include "citymap/stats.hpp"

namespace citymap {

enum class NodeColor { dark_green, green, lime_green, red, orange_red, orange, grey };

/// Web color name written to map files ("darkgreen", "orangered", ...).
std::string_view web_color(NodeColor color);

/// Color rule shared by all modes. Above expectation is green (dark when
/// significant, lime when the expected value is below five), below
/// expectation is red/orange-red/orange, and equality is grey.
NodeColor classify_color(double observed, double expected, Significance sig);

/// |observed - expected| + 1.
double topk_radius(double observed, double expected);

/// ln(n + 1), so a single-paper city keeps a visible node.
double impact_size(int n);

struct NodeStyle {
  NodeColor color = NodeColor::grey;
  double size = 1.0;
  std::string label;
};

enum class ImpactMode { i3, ri3r };

NodeStyle style_topk(const CityTopKStats& stats);
NodeStyle style_impact(const CityImpactStats& stats, ImpactMode mode);

/// One city ready for output.
struct MapNode {
  std::string name;
  std::optional<GeoPoint> location;
  int n = 0;
  double observed = 0.0;
  double expected = 0.0;
  double z = 0.0;
  Significance sig = Significance::not_computed;
  NodeStyle style;
};

MapNode make_node(const CityTopKStats& stats, std::optional<GeoPoint> location);
MapNode make_node(const CityImpactStats& stats, ImpactMode mode, std::optional<GeoPoint> location);

/// Fixed-point formatting that never prints a negative zero.
std::string fixed(double value, int decimals);

/// Output order: descending size, then name.
std::vector<std::size_t> output_order(std::span<const MapNode> nodes);

/// GPS Visualizer input: `name,desc,latitude,longitude,color,n`. Nodes
/// without a location are skipped and their names appended to `excluded`.
void emit_ztest(std::ostream& out, std::span<const MapNode> nodes, std::vector<std::string>* excluded = nullptr);

/// GeoJSON FeatureCollection of Point features.
void emit_geojson(std::ostream& out, std::span<const MapNode> nodes, std::vector<std::string>* excluded = nullptr);

/// Standalone Leaflet page showing the same features as emit_geojson.
void emit_html(std::ostream& out, std::span<const MapNode> nodes, std::string_view title,
               std::vector<std::string>* excluded = nullptr);

/// `city,lat,lon,n,observed,expected,z,sig,color,radius`, one row per node,
/// located or not.
void write_ucities_csv(std::ostream& out, std::span<const MapNode> nodes);

/// Impact table. `nodes[i]` must be the styled form of `stats[i]`.
void write_ui3_csv(std::ostream& out, std::span<const CityImpactStats> stats, std::span<const MapNode> nodes);

/// `key,n,i3` table for journal or country aggregates.
void write_aggregate_csv(std::ostream& out, std::string_view key_name, std::span<const ImpactAggregate> rows);

}  // namespace citymap
