#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

namespace succor::geo {

/// Latitude/longitude in decimal degrees. May hold out-of-range values;
/// every operation that consumes one checks `valid()` first.
struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;

    bool valid() const;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

class EarthRadius {
public:
    static constexpr double kMeanKm = 6371.0;

    constexpr EarthRadius() = default;
    /// Throws Error{Validation} unless radius_km is finite and positive.
    explicit EarthRadius(double radius_km);

    constexpr double km() const { return km_; }

private:
    double km_ = kMeanKm;
};

struct DistanceKm {
    double value = 0.0;

    friend auto operator<=>(const DistanceKm&, const DistanceKm&) = default;
};

struct Facility {
    std::string id;
    GeoPoint location;
};

struct RankedFacility {
    std::string id;
    DistanceKm distance;

    friend bool operator==(const RankedFacility&, const RankedFacility&) = default;
};

/// Throws Error{Domain} on non-finite input.
double deg_to_rad(double degrees);

/// Great-circle distance on a sphere of radius `r` (haversine, atan2 form).
/// The haversine term is clamped to [0, 1] so near-antipodal pairs never
/// produce NaN. Throws Error{Domain} for an invalid point.
DistanceKm haversine_distance(const GeoPoint& p1, const GeoPoint& p2, EarthRadius r = {});

/// Every facility with its distance from `origin`, nearest first; equal
/// distances are ordered by ascending id. Throws Error{EmptyFleet} for an
/// empty fleet and Error{Domain} for any invalid location.
std::vector<RankedFacility> rank_by_distance(const GeoPoint& origin,
                                             std::span<const Facility> fleet,
                                             EarthRadius r = {});

}  // namespace succor::geo
