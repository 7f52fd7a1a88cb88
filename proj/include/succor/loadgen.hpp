#pragma once

#include "succor/dispatcher.hpp"
#include "succor/geodesy.hpp"
#include "succor/records.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace succor::loadgen {

struct BoundingBox {
    double min_lat = 0, max_lat = 0, min_lon = 0, max_lon = 0;

    bool contains(const geo::GeoPoint& p) const;
    /// Throws Error{Validation} for inverted or out-of-range bounds.
    void validate() const;
    /// "min_lat,min_lon,max_lat,max_lon"
    static BoundingBox parse(const std::string& text);
};

/// The coordinate range of the paper-fixture fleet, padded by ~2 km.
BoundingBox default_box();

struct World {
    std::vector<PatientRecord> patients;
    std::vector<EscRecord> escs;
};

/// Deterministic for a given seed. Throws Error{Validation} when either
/// count is below 1 or the box is invalid.
World generate_world(std::uint64_t seed, std::size_t n_patients, std::size_t n_escs,
                     const BoundingBox& box);

/// Writes Registration.csv and ESC.csv in the table export format.
void write_world(const World& world, const std::filesystem::path& dir);

struct PlannedRequest {
    std::size_t patient_index = 0;
    geo::GeoPoint location;
    std::chrono::milliseconds offset{0};  // from the start of the run
    Timestamp request_time;
};

/// floor(rate * duration) requests, evenly paced, each for a distinct patient
/// (patient index i mod n_patients), locations uniform in the box.
std::vector<PlannedRequest> plan_submissions(std::uint64_t seed, double rate_per_s,
                                             double duration_s, std::size_t n_patients,
                                             const BoundingBox& box);

// --- assignment-log replay ------------------------------------------------

struct Mismatch {
    std::uint64_t seq = 0;
    std::string key;
    std::string server_esc;
    std::string oracle_esc;
    double server_km = 0;
    double oracle_km = 0;
    std::string reason;
};

struct Reconciliation {
    std::size_t assignments = 0;
    std::size_t releases = 0;
    std::vector<Mismatch> mismatches;
};

/// Rebuilds fleet state from the event stream and checks every assignment
/// against a brute-force nearest-FREE-ESC search (its own haversine, asin
/// form). Also flags assignments to an ESC that was already reserved.
Reconciliation reconcile(const std::vector<DispatchEvent>& events, double radius_km = 6371.0);

// --- load run -------------------------------------------------------------

struct RunOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    double rate_per_s = 1.0;
    double duration_s = 60.0;
    std::uint64_t seed = 42;
    /// When set, registers a generated world before the run. Otherwise the
    /// target must already hold patients for every planned request.
    bool setup_world = true;
    std::size_t n_escs = 10;
    std::size_t n_patients = 0;  // 0: one per planned request
    BoundingBox box = default_box();
    std::chrono::milliseconds ack_delay{100};
    std::chrono::milliseconds complete_delay{500};
    std::size_t clients = 32;
    /// Extra closed-loop burst after the paced phase to estimate the ceiling.
    std::size_t ceiling_requests = 0;
    std::chrono::seconds drain_timeout{300};
    double radius_km = 6371.0;
};

struct LoadReport {
    std::uint64_t submitted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t assigned = 0;
    std::uint64_t queued = 0;
    std::uint64_t failed = 0;
    double throughput_rps = 0;
    double latency_p50_ms = 0;
    double latency_p95_ms = 0;
    double latency_p99_ms = 0;
    std::uint64_t oracle_mismatches = 0;
    std::uint64_t assignments_checked = 0;
    double ceiling_rps = 0;
    std::uint64_t ceiling_failed = 0;
    double elapsed_s = 0;
    bool drained = false;
    DispatchStats server;
    bool conservation_holds = false;
    std::vector<Mismatch> mismatch_samples;

    nlohmann::json to_json() const;
    std::string summary() const;
};

/// Nearest-rank percentile of an unsorted sample; 0 for an empty sample.
double percentile(std::vector<double> values, double pct);

/// Throws Error{TargetUnreachable} if the service does not answer /health.
LoadReport run_load(const RunOptions& options);

}  // namespace succor::loadgen
