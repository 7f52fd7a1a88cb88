#pragma once

#include "succor/geodesy.hpp"

#include <cstddef>
#include <span>

namespace succor::geo::kernels {

/// One-to-many haversine over pre-validated points. `out` must be the same
/// length as `targets`. Both variants evaluate the identical per-element
/// expression, so their outputs are bitwise equal.
void distances_serial(const GeoPoint& origin, std::span<const GeoPoint> targets, double radius_km,
                      std::span<double> out);

void distances_parallel(const GeoPoint& origin, std::span<const GeoPoint> targets,
                        double radius_km, std::span<double> out);

/// Pairwise haversine: out[i] = d(a[i], b[i]).
void pairwise_serial(std::span<const GeoPoint> a, std::span<const GeoPoint> b, double radius_km,
                     std::span<double> out);

void pairwise_parallel(std::span<const GeoPoint> a, std::span<const GeoPoint> b, double radius_km,
                       std::span<double> out);

/// Below this many targets the parallel region costs more than it saves.
inline constexpr std::size_t kParallelThreshold = 4096;

}  // namespace succor::geo::kernels
