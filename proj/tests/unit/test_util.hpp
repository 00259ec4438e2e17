#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "mapcore/error.hpp"
#include "mapcore/geo.hpp"

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mapcore") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Point `east`/`north` metres from `o`, using plain metres-per-degree factors
/// rather than the library's own conversion.
inline mapcore::GeoPoint offset(const mapcore::GeoPoint& o, double east, double north) {
  const double m_per_deg = mapcore::EarthModel::kMeanRadius * mapcore::kPi / 180.0;
  return {o.lat + north / m_per_deg,
          o.lon + east / (m_per_deg * std::cos(o.lat * mapcore::kPi / 180.0))};
}

/// Point `dist` metres from `o` along compass bearing `bearing_deg`.
inline mapcore::GeoPoint polar(const mapcore::GeoPoint& o, double dist, double bearing_deg) {
  const double b = bearing_deg * mapcore::kPi / 180.0;
  return offset(o, dist * std::sin(b), dist * std::cos(b));
}

}  // namespace testutil

/// Asserts that `stmt` throws mapcore::Error with the given code.
#define EXPECT_MAPCORE_ERROR(stmt, error_code)                                        \
  do {                                                                                \
    try {                                                                             \
      stmt;                                                                           \
      ADD_FAILURE() << "expected mapcore::Error from " #stmt;                         \
    } catch (const mapcore::Error& e) {                                               \
      EXPECT_EQ(e.code(), error_code) << e.what();                                    \
    }                                                                                 \
  } while (0)
