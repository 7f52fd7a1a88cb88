#pragma once

#include "succor/geodesy.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace succor {

/// Reverse-geocoding plug-in. The address is advisory; providers may block
/// or throw and callers go through `reverse_geocode`, which bounds both.
class GeocodeProvider {
public:
    virtual ~GeocodeProvider() = default;
    virtual std::optional<std::string> lookup(const geo::GeoPoint& loc) = 0;
};

class NullGeocoder final : public GeocodeProvider {
public:
    std::optional<std::string> lookup(const geo::GeoPoint&) override { return std::nullopt; }
};

/// Exact-match table keyed on coordinates rounded to 6 decimals.
class TableGeocoder final : public GeocodeProvider {
public:
    void add(const geo::GeoPoint& loc, std::string address);
    std::optional<std::string> lookup(const geo::GeoPoint& loc) override;

private:
    static std::pair<long long, long long> key(const geo::GeoPoint& p);
    std::map<std::pair<long long, long long>, std::string> entries_;
};

/// Runs the provider's lookup on a separate thread and gives up after
/// `timeout`. Provider failure or timeout yields nullopt.
std::optional<std::string> reverse_geocode(const std::shared_ptr<GeocodeProvider>& provider,
                                           const geo::GeoPoint& loc,
                                           std::chrono::milliseconds timeout);

}  // namespace succor
