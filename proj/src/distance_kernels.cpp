#include "succor/distance_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace succor::geo::kernels {

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

inline double haversine_km(double lat1, double lon1, double lat2, double lon2, double radius_km) {
    const double phi1 = lat1 * kRadPerDeg;
    const double phi2 = lat2 * kRadPerDeg;
    const double dphi = phi2 - phi1;
    const double dlambda = lon2 * kRadPerDeg - lon1 * kRadPerDeg;
    const double s_lat = std::sin(dphi / 2.0);
    const double s_lon = std::sin(dlambda / 2.0);
    double a = s_lat * s_lat + std::cos(phi1) * std::cos(phi2) * (s_lon * s_lon);
    // 1 - a, rewritten as a sum of squares. Subtracting from 1 loses about
    // half the digits of the result when a is close to 1 (near antipodes).
    const double c_lat = std::cos(dphi / 2.0);
    const double c_lon = std::cos(dlambda / 2.0);
    const double s_mid = std::sin((phi1 + phi2) / 2.0);
    double not_a = c_lat * c_lat * (c_lon * c_lon) + s_mid * s_mid * (s_lon * s_lon);
    a = std::clamp(a, 0.0, 1.0);
    not_a = std::clamp(not_a, 0.0, 1.0);
    const double c = 2.0 * std::atan2(std::sqrt(a), std::sqrt(not_a));
    return radius_km * c;
}

}  // namespace

void distances_serial(const GeoPoint& origin, std::span<const GeoPoint> targets, double radius_km,
                      std::span<double> out) {
    for (std::size_t i = 0; i < targets.size(); ++i)
        out[i] = haversine_km(origin.lat_deg, origin.lon_deg, targets[i].lat_deg,
                              targets[i].lon_deg, radius_km);
}

void distances_parallel(const GeoPoint& origin, std::span<const GeoPoint> targets,
                        double radius_km, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(targets.size());
    const GeoPoint* t = targets.data();
    double* o = out.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        o[i] = haversine_km(origin.lat_deg, origin.lon_deg, t[i].lat_deg, t[i].lon_deg, radius_km);
}

void pairwise_serial(std::span<const GeoPoint> a, std::span<const GeoPoint> b, double radius_km,
                     std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = haversine_km(a[i].lat_deg, a[i].lon_deg, b[i].lat_deg, b[i].lon_deg, radius_km);
}

void pairwise_parallel(std::span<const GeoPoint> a, std::span<const GeoPoint> b, double radius_km,
                       std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    const GeoPoint* pa = a.data();
    const GeoPoint* pb = b.data();
    double* o = out.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        o[i] = haversine_km(pa[i].lat_deg, pa[i].lon_deg, pb[i].lat_deg, pb[i].lon_deg, radius_km);
}

}  // namespace succor::geo::kernels
