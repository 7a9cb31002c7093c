#pragma once

#include <cmath>

namespace uavmob {

/// Ground-plane location of an IoT device, in meters.
struct GroundPosition {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GroundPosition&, const GroundPosition&) = default;
};

/// UAV location: ground coordinates plus altitude, all in meters.
struct UavPosition {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;

  GroundPosition ground() const { return {x, y}; }

  friend bool operator==(const UavPosition&, const UavPosition&) = default;
};

inline double ground_distance_sq(const GroundPosition& a, const GroundPosition& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double ground_distance(const GroundPosition& a, const GroundPosition& b) {
  return std::sqrt(ground_distance_sq(a, b));
}

/// Squared device-to-UAV slant distance.
inline double slant_distance_sq(const GroundPosition& device, const UavPosition& uav) {
  return ground_distance_sq(device, uav.ground()) + uav.h * uav.h;
}

inline double slant_distance(const GroundPosition& device, const UavPosition& uav) {
  return std::sqrt(slant_distance_sq(device, uav));
}

inline double distance(const UavPosition& a, const UavPosition& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dh = a.h - b.h;
  return std::sqrt(dx * dx + dy * dy + dh * dh);
}

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace uavmob
