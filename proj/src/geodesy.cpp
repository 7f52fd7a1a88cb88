#include "succor/geodesy.hpp"

#include "succor/distance_kernels.hpp"
#include "succor/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace succor::geo {

namespace {

void require_valid(const GeoPoint& p) {
    if (!p.valid())
        fail(ErrorCode::Domain, "invalid coordinate (" + std::to_string(p.lat_deg) + ", " +
                                    std::to_string(p.lon_deg) + ")");
}

}  // namespace

bool GeoPoint::valid() const {
    return std::isfinite(lat_deg) && std::isfinite(lon_deg) && lat_deg >= -90.0 &&
           lat_deg <= 90.0 && lon_deg >= -180.0 && lon_deg <= 180.0;
}

EarthRadius::EarthRadius(double radius_km) : km_(radius_km) {
    if (!std::isfinite(radius_km) || radius_km <= 0.0)
        fail(ErrorCode::Validation, "earth radius must be positive");
}

double deg_to_rad(double degrees) {
    if (!std::isfinite(degrees))
        fail(ErrorCode::Domain, "non-finite angle");
    return degrees * (std::numbers::pi / 180.0);
}

DistanceKm haversine_distance(const GeoPoint& p1, const GeoPoint& p2, EarthRadius r) {
    require_valid(p1);
    require_valid(p2);
    double d = 0.0;
    kernels::distances_serial(p1, std::span(&p2, 1), r.km(), std::span(&d, 1));
    return DistanceKm{d};
}

std::vector<RankedFacility> rank_by_distance(const GeoPoint& origin,
                                             std::span<const Facility> fleet, EarthRadius r) {
    if (fleet.empty())
        fail(ErrorCode::EmptyFleet, "cannot rank an empty fleet");
    require_valid(origin);

    std::vector<GeoPoint> points;
    points.reserve(fleet.size());
    for (const auto& f : fleet) {
        require_valid(f.location);
        points.push_back(f.location);
    }

    std::vector<double> dist(fleet.size());
    if (fleet.size() >= kernels::kParallelThreshold)
        kernels::distances_parallel(origin, points, r.km(), dist);
    else
        kernels::distances_serial(origin, points, r.km(), dist);

    std::vector<std::size_t> order(fleet.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b])
            return dist[a] < dist[b];
        return fleet[a].id < fleet[b].id;
    });

    std::vector<RankedFacility> ranked;
    ranked.reserve(order.size());
    for (auto i : order)
        ranked.push_back({fleet[i].id, DistanceKm{dist[i]}});
    return ranked;
}

}  // namespace succor::geo
