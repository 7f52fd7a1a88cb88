#pragma once

#include "succor/geodesy.hpp"
#include "succor/records.hpp"
#include "succor/registry.hpp"
#include "succor/timestamp.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace succor {

enum class RequestState { Received, Reserved, Acknowledged, Handled };

std::string_view to_string(RequestState s);
/// "red" while the request is live, "black" once handled.
std::string_view color_of(RequestState s);

struct Assignment {
    RequestKey key;
    std::string esc_id;
    geo::DistanceKm distance;
    Timestamp assigned_at;
};

struct SubmitOutcome {
    RequestKey key;
    Timestamp received_time;
    std::optional<Assignment> assignment;  // empty when queued

    bool queued() const { return !assignment.has_value(); }
};

enum class StatusFilter { New, Handled, All };

/// Parses "new", "handled" or "all" (case-insensitive).
StatusFilter parse_status_filter(std::string_view text);

struct RequestView {
    RequestKey key;
    RequestState state = RequestState::Received;
    Location location;
    Timestamp received_time;
    std::optional<std::string> terminal_id;
    std::optional<Timestamp> assigned_at;
    std::optional<Timestamp> received_time2;
    std::optional<Timestamp> reply_time;
};

/// Ordered record of every fleet-state change the dispatcher commits. Replaying
/// it from the start reconstructs which ESCs were FREE at each assignment.
struct DispatchEvent {
    enum class Kind { EscState, Assign, Release };

    std::uint64_t seq = 0;
    Kind kind = Kind::EscState;
    std::string esc_id;
    geo::GeoPoint location;          // ESC location (EscState) or request location (Assign)
    bool reserved = false;           // EscState only
    std::optional<RequestKey> key;   // Assign and Release
    double distance_km = 0.0;        // Assign only
    Timestamp at;
};

std::string_view to_string(DispatchEvent::Kind k);

/// Counters over requests submitted through this dispatcher.
/// Conservation: submitted == live + queued + handled + rejected.
struct DispatchStats {
    std::uint64_t submitted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t live = 0;    // RESERVED or ACKNOWLEDGED
    std::uint64_t queued = 0;  // RECEIVED, waiting for a FREE ESC
    std::uint64_t handled = 0;
    std::uint64_t assignments = 0;
};

/// The request lifecycle RECEIVED -> RESERVED -> ACKNOWLEDGED -> HANDLED.
///
/// submit_help, esc_ack, esc_complete and upsert_esc are linearizable: each
/// runs under one dispatch lock, so choosing the nearest FREE ESC and
/// reserving it is a single step. Listeners run after the lock is released,
/// once per assignment.
class Dispatcher {
public:
    using AssignmentListener = std::function<void(const Assignment&, const HelpRequest&)>;

    Dispatcher(Registry& registry, geo::EarthRadius radius = {},
               std::shared_ptr<ServerClock> clock = std::make_shared<ServerClock>());

    /// Invoked for every assignment, including ones made when the queue drains.
    void add_listener(AssignmentListener listener);

    SubmitOutcome submit_help(const std::string& patient_id, const geo::GeoPoint& location,
                              Timestamp request_time);

    RequestState esc_ack(const RequestKey& key, const std::string& esc_id,
                         std::optional<Timestamp> ack_time = std::nullopt);

    /// Accepted from RESERVED or ACKNOWLEDGED; from RESERVED the ack time is
    /// taken to be the reply time. Frees the ESC and drains the queue.
    HandledRequest esc_complete(const RequestKey& key, const std::string& esc_id,
                                std::optional<Timestamp> reply_time = std::nullopt);

    /// Registry upsert followed by a queue drain, so a new FREE ESC picks up
    /// waiting requests.
    bool upsert_esc(const EscRecord& rec);

    /// Rebuilds the queue from unreserved live rows (oldest received first)
    /// and drains it. Call after importing tables underneath a running
    /// dispatcher.
    void resync();

    std::vector<RequestView> list_requests(StatusFilter filter) const;
    std::optional<RequestState> state_of(const RequestKey& key) const;

    std::vector<DispatchEvent> events(std::uint64_t since_seq = 0) const;
    DispatchStats stats() const;
    std::vector<RequestKey> queued_keys() const;

    geo::EarthRadius radius() const { return radius_; }
    Registry& registry() { return registry_; }

private:
    struct Pending {
        Assignment assignment;
        HelpRequest request;
    };

    void rebuild_locked();
    void drain_locked(std::vector<Pending>& out);
    std::optional<Pending> try_assign_locked(const RequestKey& key);
    void record_esc_state_locked(const EscRecord& e);
    void notify(const std::vector<Pending>& pending);
    DispatchEvent& push_event_locked(DispatchEvent::Kind kind);

    Registry& registry_;
    geo::EarthRadius radius_;
    std::shared_ptr<ServerClock> clock_;

    mutable std::mutex mutex_;
    std::deque<RequestKey> queue_;
    std::set<RequestKey> own_;
    DispatchStats stats_;
    std::vector<DispatchEvent> events_;
    std::uint64_t next_event_ = 1;

    std::mutex listeners_mutex_;
    std::vector<AssignmentListener> listeners_;
};

}  // namespace succor
