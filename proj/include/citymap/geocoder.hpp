#pragma once

#include <chrono>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "citymap/city.hpp"

namespace citymap {

enum class GeoSource { gazetteer, cache, remote, manual };

std::string_view to_string(GeoSource source);

/// A coordinate pair. Construction throws std::out_of_range when latitude is
/// outside [-90, 90] or longitude outside [-180, 180].
class GeoPoint {
 public:
  GeoPoint(double lat, double lon, GeoSource source);

  double lat() const { return lat_; }
  double lon() const { return lon_; }
  GeoSource source() const { return source_; }

 private:
  double lat_;
  double lon_;
  GeoSource source_;
};

/// Rendered CityKey -> coordinates, stored as CSV with header
/// `city_key,lat,lon`. The geocode cache uses the same format.
class Gazetteer {
 public:
  Gazetteer() = default;

  /// Loads a CSV file; every entry gets `source`. A missing file yields an
  /// empty table when `missing_ok` is set.
  static Gazetteer load(const std::filesystem::path& path, GeoSource source, bool missing_ok = false);
  static Gazetteer read(std::istream& in, GeoSource source);

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  const GeoPoint* find(const CityKey& key) const;
  void insert(const CityKey& key, const GeoPoint& point);
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, GeoPoint>& entries() const { return entries_; }

 private:
  std::map<std::string, GeoPoint> entries_;
};

class GeocodeError : public std::runtime_error {
 public:
  enum class Kind { transport, rate_limited, http_status, malformed_body, out_of_range, config };

  GeocodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct RemoteConfig {
  /// e.g. "http://localhost:8080/geocode?city={city}&region={region}&country={country}&key={key}".
  std::string url_template;
  std::string api_key;
  std::chrono::milliseconds min_interval{1000};
  std::chrono::seconds timeout{10};
};

/// HTTP client for an external geocoding service. Responses must be JSON
/// objects carrying `lat`/`lon` (also accepted: `latitude`/`longitude`,
/// `lng`). Calls are serialized and spaced by at least `min_interval`.
class RemoteGeocoder {
 public:
  explicit RemoteGeocoder(RemoteConfig config);

  /// Throws GeocodeError; never returns a fabricated point.
  GeoPoint fetch(const CityKey& key);

  std::size_t requests_made() const { return requests_; }

 private:
  RemoteConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_template_;
  std::mutex mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  std::size_t requests_ = 0;
};

/// Lookup order: gazetteer, then cache, then (if configured) remote. Remote
/// hits are added to the cache; failures are recorded and leave the cache
/// untouched.
class Geocoder {
 public:
  Geocoder(Gazetteer gazetteer, Gazetteer cache, RemoteGeocoder* remote = nullptr);

  std::optional<GeoPoint> resolve(const CityKey& key);

  const Gazetteer& cache() const { return cache_; }
  bool cache_modified() const { return cache_modified_; }
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  Gazetteer gazetteer_;
  Gazetteer cache_;
  RemoteGeocoder* remote_;
  bool cache_modified_ = false;
  std::vector<std::string> errors_;
};

}  // namespace citymap
