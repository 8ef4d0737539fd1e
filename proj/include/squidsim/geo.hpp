#pragma once

namespace squidsim {

inline constexpr double kMetersPerDegree = 111320.0;

struct GeoPoint {
  double lat = 0.0;  // deg
  double lon = 0.0;  // deg

  bool operator==(const GeoPoint&) const = default;
};

// Flat-earth tangent plane around a reference point; x north, y east.
struct GeoRef {
  double lat0 = 21.027252;
  double lon0 = 105.851954;
};

GeoPoint local_to_geo(const GeoRef& ref, double north, double east);
void geo_to_local(const GeoRef& ref, const GeoPoint& p, double& north, double& east);

/// Flat-earth bearing in [0, 360), 0 = north, 90 = east. Coincident points
/// give 0.
double bearing(const GeoPoint& from, const GeoPoint& to);

/// Flat-earth horizontal distance, m.
double distance(const GeoPoint& from, const GeoPoint& to);

}  // namespace squidsim
