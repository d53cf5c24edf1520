#include "citymap/geocoder.hpp"

#include <fmt/format.h>

#include <fstream>
#include <thread>

#include "citymap/csv.hpp"
#include "httplib.h"
#include "json.hpp"

namespace citymap {

namespace {

std::string url_encode(std::string_view s) {
  std::string out;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += ch;
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::optional<double> json_number(const nlohmann::json& body, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    const auto it = body.find(name);
    if (it == body.end()) continue;
    if (it->is_number()) return it->get<double>();
    if (it->is_string()) {
      try {
        std::size_t used = 0;
        const std::string& text = it->get_ref<const std::string&>();
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
      } catch (const std::exception&) {
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(GeoSource source) {
  switch (source) {
    case GeoSource::gazetteer: return "gazetteer";
    case GeoSource::cache: return "cache";
    case GeoSource::remote: return "remote";
    case GeoSource::manual: return "manual";
  }
  return "unknown";
}

GeoPoint::GeoPoint(double lat, double lon, GeoSource source) : lat_(lat), lon_(lon), source_(source) {
  if (!(lat >= -90.0 && lat <= 90.0)) throw std::out_of_range(fmt::format("latitude {} outside [-90, 90]", lat));
  if (!(lon >= -180.0 && lon <= 180.0)) {
    throw std::out_of_range(fmt::format("longitude {} outside [-180, 180]", lon));
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path, GeoSource source, bool missing_ok) {
  std::ifstream in(path);
  if (!in) {
    if (missing_ok && !std::filesystem::exists(path)) return {};
    throw std::runtime_error("cannot read gazetteer: " + path.string());
  }
  return read(in, source);
}

Gazetteer Gazetteer::read(std::istream& in, GeoSource source) {
  Gazetteer g;
  const auto rows = csv::read(in);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "city_key") continue;
    const auto where = fmt::format("gazetteer row {}", i + 1);
    if (r.size() != 3) throw std::runtime_error(where + ": expected city_key,lat,lon");
    const auto key = CityKey::parse_rendered(r[0]);
    if (!key) throw std::runtime_error(where + ": invalid city key '" + r[0] + "'");
    try {
      g.insert(*key, GeoPoint(std::stod(r[1]), std::stod(r[2]), source));
    } catch (const std::out_of_range& e) {
      throw std::runtime_error(where + ": " + e.what());
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(where + ": non-numeric coordinate");
    }
  }
  return g;
}

void Gazetteer::write(std::ostream& out) const {
  out << "city_key,lat,lon\n";
  for (const auto& [key, point] : entries_) {
    out << csv::field(key) << ',' << fmt::format("{:.6f},{:.6f}", point.lat(), point.lon()) << '\n';
  }
}

void Gazetteer::save(const std::filesystem::path& path) const {
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write gazetteer: " + tmp.string());
    write(out);
  }
  std::filesystem::rename(tmp, path);
}

const GeoPoint* Gazetteer::find(const CityKey& key) const {
  const auto it = entries_.find(key.render());
  return it == entries_.end() ? nullptr : &it->second;
}

void Gazetteer::insert(const CityKey& key, const GeoPoint& point) { entries_.insert_or_assign(key.render(), point); }

RemoteGeocoder::RemoteGeocoder(RemoteConfig config) : config_(std::move(config)) {
  const auto& t = config_.url_template;
  const auto scheme_end = t.find("://");
  if (scheme_end == std::string::npos || t.substr(0, scheme_end) != "http") {
    throw GeocodeError(GeocodeError::Kind::config, "geocoder URL template must start with http://");
  }
  const auto path_start = t.find('/', scheme_end + 3);
  origin_ = t.substr(0, path_start);
  path_template_ = path_start == std::string::npos ? "/" : t.substr(path_start);
}

GeoPoint RemoteGeocoder::fetch(const CityKey& key) {
  std::lock_guard lock(mutex_);
  if (last_request_) {
    const auto next = *last_request_ + config_.min_interval;
    if (const auto now = std::chrono::steady_clock::now(); now < next) std::this_thread::sleep_until(next);
  }
  last_request_ = std::chrono::steady_clock::now();
  ++requests_;

  std::string path = path_template_;
  replace_all(path, "{city}", url_encode(key.city));
  replace_all(path, "{region}", url_encode(key.region));
  replace_all(path, "{country}", url_encode(key.country));
  replace_all(path, "{query}", url_encode(key.render()));
  replace_all(path, "{key}", url_encode(config_.api_key));

  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  const auto res = client.Get(path);
  if (!res) {
    throw GeocodeError(GeocodeError::Kind::transport,
                       "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) throw GeocodeError(GeocodeError::Kind::rate_limited, "rate limited (HTTP 429)");
  if (res->status < 200 || res->status >= 300) {
    throw GeocodeError(GeocodeError::Kind::http_status, fmt::format("HTTP status {}", res->status));
  }

  const auto body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw GeocodeError(GeocodeError::Kind::malformed_body, "response is not a JSON object");
  }
  const auto lat = json_number(body, {"lat", "latitude"});
  const auto lon = json_number(body, {"lon", "lng", "longitude"});
  if (!lat || !lon) throw GeocodeError(GeocodeError::Kind::malformed_body, "response lacks numeric lat/lon");
  try {
    return GeoPoint(*lat, *lon, GeoSource::remote);
  } catch (const std::out_of_range& e) {
    throw GeocodeError(GeocodeError::Kind::out_of_range, e.what());
  }
}

Geocoder::Geocoder(Gazetteer gazetteer, Gazetteer cache, RemoteGeocoder* remote)
    : gazetteer_(std::move(gazetteer)), cache_(std::move(cache)), remote_(remote) {}

std::optional<GeoPoint> Geocoder::resolve(const CityKey& key) {
  if (const auto* p = gazetteer_.find(key)) return *p;
  if (const auto* p = cache_.find(key)) return *p;
  if (remote_ == nullptr) {
    errors_.push_back(key.render() + ": not in gazetteer or cache");
    return std::nullopt;
  }
  try {
    const auto point = remote_->fetch(key);
    cache_.insert(key, GeoPoint(point.lat(), point.lon(), GeoSource::cache));
    cache_modified_ = true;
    return point;
  } catch (const GeocodeError& e) {
    errors_.push_back(key.render() + ": " + e.what());
    return std::nullopt;
  }
}

}  // namespace citymap
