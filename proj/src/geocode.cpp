#include "succor/geocode.hpp"

#include <cmath>
#include <future>
#include <thread>

namespace succor {

std::pair<long long, long long> TableGeocoder::key(const geo::GeoPoint& p) {
    return {std::llround(p.lat_deg * 1e6), std::llround(p.lon_deg * 1e6)};
}

void TableGeocoder::add(const geo::GeoPoint& loc, std::string address) {
    entries_[key(loc)] = std::move(address);
}

std::optional<std::string> TableGeocoder::lookup(const geo::GeoPoint& loc) {
    auto it = entries_.find(key(loc));
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::string> reverse_geocode(const std::shared_ptr<GeocodeProvider>& provider,
                                           const geo::GeoPoint& loc,
                                           std::chrono::milliseconds timeout) {
    if (!provider || !loc.valid())
        return std::nullopt;
    auto promise = std::make_shared<std::promise<std::optional<std::string>>>();
    auto result = promise->get_future();
    // Detached so a hung provider cannot hold the caller past the timeout.
    std::thread([provider, loc, promise] {
        try {
            promise->set_value(provider->lookup(loc));
        } catch (...) {
            promise->set_value(std::nullopt);
        }
    }).detach();
    if (result.wait_for(timeout) != std::future_status::ready)
        return std::nullopt;
    return result.get();
}

}  // namespace succor
