#include "citymap/map_emitter.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "citymap/csv.hpp"
#include "json.hpp"

namespace citymap {

namespace {

std::string label_text(std::string_view observed, double expected, double z, Significance sig) {
  return fmt::format("observed: {}; expected: {}; z = {}{}", observed, fixed(expected, 1), fixed(z, 2), stars(sig));
}

std::vector<std::size_t> located(std::span<const MapNode> nodes, std::vector<std::string>* excluded) {
  std::vector<std::size_t> out;
  for (const auto i : output_order(nodes)) {
    if (nodes[i].location) {
      out.push_back(i);
    } else if (excluded != nullptr) {
      excluded->push_back(nodes[i].name);
    }
  }
  return out;
}

nlohmann::json feature_collection(std::span<const MapNode> nodes, std::vector<std::string>* excluded) {
  auto features = nlohmann::json::array();
  for (const auto i : located(nodes, excluded)) {
    const auto& node = nodes[i];
    features.push_back({
        {"type", "Feature"},
        {"geometry", {{"type", "Point"}, {"coordinates", {node.location->lon(), node.location->lat()}}}},
        {"properties",
         {{"name", node.name},
          {"n", node.n},
          {"observed", node.observed},
          {"expected", node.expected},
          {"z", node.z},
          {"stars", std::string(stars(node.sig))},
          {"sig", std::string(to_string(node.sig))},
          {"color", std::string(web_color(node.style.color))},
          {"size", node.style.size},
          {"label", node.style.label}}},
    });
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace

std::string_view web_color(NodeColor color) {
  switch (color) {
    case NodeColor::dark_green: return "darkgreen";
    case NodeColor::green: return "green";
    case NodeColor::lime_green: return "limegreen";
    case NodeColor::red: return "red";
    case NodeColor::orange_red: return "orangered";
    case NodeColor::orange: return "orange";
    case NodeColor::grey: return "gray";
  }
  return "gray";
}

NodeColor classify_color(double observed, double expected, Significance sig) {
  if (observed == expected) return NodeColor::grey;
  const bool legitimate = expected >= kMinExpectedForTest;
  const bool significant = sig == Significance::p05 || sig == Significance::p01 || sig == Significance::p001;
  if (observed > expected) {
    if (!legitimate) return NodeColor::lime_green;
    return significant ? NodeColor::dark_green : NodeColor::green;
  }
  if (!legitimate) return NodeColor::orange;
  return significant ? NodeColor::red : NodeColor::orange_red;
}

double topk_radius(double observed, double expected) { return std::fabs(observed - expected) + 1.0; }

double impact_size(int n) { return std::log(static_cast<double>(n) + 1.0); }

std::string fixed(double value, int decimals) {
  auto text = fmt::format("{:.{}f}", value, decimals);
  if (text.starts_with('-') && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
  return text;
}

NodeStyle style_topk(const CityTopKStats& stats) {
  NodeStyle style;
  style.color = classify_color(stats.observed, stats.expected, stats.sig);
  style.size = topk_radius(stats.observed, stats.expected);
  style.label = label_text(std::to_string(stats.observed), stats.expected, stats.z, stats.sig);
  return style;
}

NodeStyle style_impact(const CityImpactStats& stats, ImpactMode mode) {
  const bool i3 = mode == ImpactMode::i3;
  const double observed = i3 ? stats.i3_observed : stats.ri3r_observed;
  const double expected = i3 ? stats.i3_expected : stats.ri3r_expected;
  const double z = i3 ? stats.z_i3 : stats.z_ri3r;
  const auto sig = i3 ? stats.sig_i3 : stats.sig_ri3r;
  NodeStyle style;
  style.color = classify_color(observed, expected, sig);
  style.size = impact_size(stats.n);
  style.label = label_text(fixed(observed, 1), expected, z, sig);
  return style;
}

MapNode make_node(const CityTopKStats& stats, std::optional<GeoPoint> location) {
  return {stats.city.render(), location, stats.n, static_cast<double>(stats.observed), stats.expected,
          stats.z, stats.sig, style_topk(stats)};
}

MapNode make_node(const CityImpactStats& stats, ImpactMode mode, std::optional<GeoPoint> location) {
  const bool i3 = mode == ImpactMode::i3;
  return {stats.city.render(),
          location,
          stats.n,
          i3 ? stats.i3_observed : stats.ri3r_observed,
          i3 ? stats.i3_expected : stats.ri3r_expected,
          i3 ? stats.z_i3 : stats.z_ri3r,
          i3 ? stats.sig_i3 : stats.sig_ri3r,
          style_impact(stats, mode)};
}

std::vector<std::size_t> output_order(std::span<const MapNode> nodes) {
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (nodes[a].style.size != nodes[b].style.size) return nodes[a].style.size > nodes[b].style.size;
    return nodes[a].name < nodes[b].name;
  });
  return order;
}

void emit_ztest(std::ostream& out, std::span<const MapNode> nodes, std::vector<std::string>* excluded) {
  out << "name,desc,latitude,longitude,color,n\n";
  for (const auto i : located(nodes, excluded)) {
    const auto& node = nodes[i];
    out << csv::row({node.name, node.style.label, fixed(node.location->lat(), 4), fixed(node.location->lon(), 4),
                     std::string(web_color(node.style.color)), fixed(node.style.size, 2)})
        << '\n';
  }
}

void emit_geojson(std::ostream& out, std::span<const MapNode> nodes, std::vector<std::string>* excluded) {
  out << feature_collection(nodes, excluded).dump(2) << '\n';
}

void emit_html(std::ostream& out, std::span<const MapNode> nodes, std::string_view title,
               std::vector<std::string>* excluded) {
  auto data = feature_collection(nodes, excluded).dump();
  // Keep the inline script from being closed by data.
  for (auto pos = data.find("</"); pos != std::string::npos; pos = data.find("</", pos + 3)) data.replace(pos, 2, "<\\/");
  std::string escaped_title;
  for (const char c : title) {
    switch (c) {
      case '<': escaped_title += "&lt;"; break;
      case '>': escaped_title += "&gt;"; break;
      case '&': escaped_title += "&amp;"; break;
      default: escaped_title += c;
    }
  }
  out << R"(<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>)" << escaped_title
      << R"(</title>
<link rel="stylesheet" href="https://unpkg.com/leaflet@1.9.4/dist/leaflet.css">
<script src="https://unpkg.com/leaflet@1.9.4/dist/leaflet.js"></script>
<style>html, body, #map { height: 100%; margin: 0; }</style>
</head>
<body>
<div id="map"></div>
<script>
const cities = )" << data
      << R"(;
const map = L.map('map').setView([30, 0], 2);
L.tileLayer('https://{s}.tile.openstreetmap.org/{z}/{x}/{y}.png', {
  maxZoom: 18,
  attribution: '&copy; OpenStreetMap contributors'
}).addTo(map);
const maxSize = Math.max(1, ...cities.features.map(f => f.properties.size));
L.geoJSON(cities, {
  pointToLayer: (feature, latlng) => L.circleMarker(latlng, {
    radius: 3 + 27 * feature.properties.size / maxSize,
    color: feature.properties.color,
    fillColor: feature.properties.color,
    fillOpacity: 0.6,
    weight: 1
  }),
  onEachFeature: (feature, layer) => {
    const p = feature.properties;
    const div = document.createElement('div');
    const b = document.createElement('b');
    b.textContent = p.name;
    div.appendChild(b);
    div.appendChild(document.createElement('br'));
    div.appendChild(document.createTextNode(p.label));
    layer.bindPopup(div);
  }
}).addTo(map);
</script>
</body>
</html>
)";
}

void write_ucities_csv(std::ostream& out, std::span<const MapNode> nodes) {
  out << "city,lat,lon,n,observed,expected,z,sig,color,radius\n";
  for (const auto i : output_order(nodes)) {
    const auto& node = nodes[i];
    out << csv::row({node.name, node.location ? fixed(node.location->lat(), 4) : "",
                     node.location ? fixed(node.location->lon(), 4) : "", std::to_string(node.n),
                     fixed(node.observed, 0), fixed(node.expected, 4), fixed(node.z, 4),
                     std::string(to_string(node.sig)), std::string(web_color(node.style.color)),
                     fixed(node.style.size, 4)})
        << '\n';
  }
}

void write_ui3_csv(std::ostream& out, std::span<const CityImpactStats> stats, std::span<const MapNode> nodes) {
  out << "city,lat,lon,n,i3_observed,i3_expected,z_i3,sig_i3,ri3r_observed,ri3r_expected,z_ri3r,sig_ri3r,color,"
         "size\n";
  for (const auto i : output_order(nodes)) {
    const auto& s = stats[i];
    const auto& node = nodes[i];
    out << csv::row({node.name, node.location ? fixed(node.location->lat(), 4) : "",
                     node.location ? fixed(node.location->lon(), 4) : "", std::to_string(s.n),
                     fixed(s.i3_observed, 4), fixed(s.i3_expected, 4), fixed(s.z_i3, 4),
                     std::string(to_string(s.sig_i3)), fixed(s.ri3r_observed, 4), fixed(s.ri3r_expected, 4),
                     fixed(s.z_ri3r, 4), std::string(to_string(s.sig_ri3r)),
                     std::string(web_color(node.style.color)), fixed(node.style.size, 4)})
        << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, std::string_view key_name, std::span<const ImpactAggregate> rows) {
  out << key_name << ",n,i3\n";
  for (const auto& r : rows) out << csv::row({r.key, std::to_string(r.n), fixed(r.i3, 4)}) << '\n';
}

}  // namespace citymap
