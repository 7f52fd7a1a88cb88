#include "succor/dispatcher.hpp"

#include "succor/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace succor {

namespace {

RequestState derive_state(const HelpRequest& r) {
    if (!r.is_reserved)
        return RequestState::Received;
    return r.ack_time ? RequestState::Acknowledged : RequestState::Reserved;
}

RequestView view_of(const HelpRequest& r) {
    RequestView v;
    v.key = r.key();
    v.state = derive_state(r);
    v.location = r.location;
    v.received_time = r.received_time;
    v.terminal_id = r.terminal_id;
    v.assigned_at = r.assigned_at;
    v.received_time2 = r.ack_time;
    return v;
}

RequestView view_of(const HandledRequest& h) {
    RequestView v;
    v.key = h.key();
    v.state = RequestState::Handled;
    v.location = h.location;
    v.received_time = h.received_time;
    v.terminal_id = h.esc_id;
    v.received_time2 = h.received_time2;
    v.reply_time = h.reply_time;
    return v;
}

}  // namespace

std::string_view to_string(RequestState s) {
    switch (s) {
    case RequestState::Received: return "RECEIVED";
    case RequestState::Reserved: return "RESERVED";
    case RequestState::Acknowledged: return "ACKNOWLEDGED";
    case RequestState::Handled: return "HANDLED";
    }
    return "?";
}

std::string_view color_of(RequestState s) {
    return s == RequestState::Handled ? "black" : "red";
}

std::string_view to_string(DispatchEvent::Kind k) {
    switch (k) {
    case DispatchEvent::Kind::EscState: return "esc";
    case DispatchEvent::Kind::Assign: return "assign";
    case DispatchEvent::Kind::Release: return "release";
    }
    return "?";
}

StatusFilter parse_status_filter(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (lower == "new")
        return StatusFilter::New;
    if (lower == "handled")
        return StatusFilter::Handled;
    if (lower == "all" || lower.empty())
        return StatusFilter::All;
    fail(ErrorCode::Validation, "status must be new, handled or all");
}

Dispatcher::Dispatcher(Registry& registry, geo::EarthRadius radius,
                       std::shared_ptr<ServerClock> clock)
    : registry_(registry), radius_(radius), clock_(std::move(clock)) {
    std::lock_guard lock(mutex_);
    rebuild_locked();
}

void Dispatcher::add_listener(AssignmentListener listener) {
    std::lock_guard lock(listeners_mutex_);
    listeners_.push_back(std::move(listener));
}

SubmitOutcome Dispatcher::submit_help(const std::string& patient_id, const geo::GeoPoint& location,
                                      Timestamp request_time) {
    std::vector<Pending> pending;
    SubmitOutcome outcome;
    {
        std::lock_guard lock(mutex_);
        ++stats_.submitted;
        try {
            if (!location.valid())
                fail(ErrorCode::Validation, "request location out of range");
            if (!registry_.find_patient(patient_id))
                fail(ErrorCode::UnknownPatient, "patient not registered: " + patient_id);
            if (auto live = registry_.live_key_for_patient(patient_id))
                fail(ErrorCode::Duplicate, "patient already has a live request: " + live->str());

            HelpRequest req;
            req.patient_id = patient_id;
            req.request_time = request_time;
            req.received_time = clock_->now();
            req.location = Location::from_point(location);
            registry_.insert_live(req);
            outcome.key = req.key();
            outcome.received_time = req.received_time;
        } catch (...) {
            ++stats_.rejected;
            throw;
        }
        own_.insert(outcome.key);
        ++stats_.queued;
        queue_.push_back(outcome.key);
        drain_locked(pending);
    }
    for (const auto& p : pending)
        if (p.assignment.key == outcome.key)
            outcome.assignment = p.assignment;
    notify(pending);
    return outcome;
}

RequestState Dispatcher::esc_ack(const RequestKey& key, const std::string& esc_id,
                                 std::optional<Timestamp> ack_time) {
    std::lock_guard lock(mutex_);
    const auto row = registry_.find_live(key);
    if (!row) {
        if (registry_.is_handled(key))
            fail(ErrorCode::BadState, "request already handled: " + key.str());
        fail(ErrorCode::NotFound, "no such request: " + key.str());
    }
    if (!row->is_reserved)
        fail(ErrorCode::BadState, "request is not reserved: " + key.str());
    if (row->terminal_id != esc_id)
        fail(ErrorCode::WrongTerminal, esc_id + " is not assigned to " + key.str());
    if (row->ack_time)
        fail(ErrorCode::BadState, "request already acknowledged: " + key.str());

    const Timestamp t = ack_time.value_or(clock_->now());
    if (t < row->assigned_at.value_or(row->received_time))
        fail(ErrorCode::Validation, "ack time precedes assignment");
    registry_.acknowledge(key, t);
    return RequestState::Acknowledged;
}

HandledRequest Dispatcher::esc_complete(const RequestKey& key, const std::string& esc_id,
                                        std::optional<Timestamp> reply_time) {
    std::vector<Pending> pending;
    HandledRequest handled;
    {
        std::lock_guard lock(mutex_);
        const auto row = registry_.find_live(key);
        if (!row) {
            if (registry_.is_handled(key))
                fail(ErrorCode::BadState, "request already handled: " + key.str());
            fail(ErrorCode::NotFound, "no such request: " + key.str());
        }
        if (!row->is_reserved)
            fail(ErrorCode::BadState, "request is not reserved: " + key.str());
        if (row->terminal_id != esc_id)
            fail(ErrorCode::WrongTerminal, esc_id + " is not assigned to " + key.str());

        const Timestamp t = reply_time.value_or(clock_->now());
        const Timestamp lower = row->ack_time.value_or(row->assigned_at.value_or(row->received_time));
        if (t < lower)
            fail(ErrorCode::Validation, "reply time precedes acknowledgment");
        handled = registry_.complete(key, row->ack_time.value_or(t), t);

        if (own_.contains(key)) {
            --stats_.live;
            ++stats_.handled;
        }
        auto& ev = push_event_locked(DispatchEvent::Kind::Release);
        ev.esc_id = esc_id;
        ev.key = key;
        ev.at = t;
        drain_locked(pending);
    }
    notify(pending);
    return handled;
}

bool Dispatcher::upsert_esc(const EscRecord& rec) {
    std::vector<Pending> pending;
    bool created = false;
    {
        std::lock_guard lock(mutex_);
        created = registry_.upsert_esc(rec);
        record_esc_state_locked(*registry_.find_esc(rec.id));
        drain_locked(pending);
    }
    notify(pending);
    return created;
}

void Dispatcher::resync() {
    std::vector<Pending> pending;
    {
        std::lock_guard lock(mutex_);
        rebuild_locked();
        drain_locked(pending);
    }
    notify(pending);
}

void Dispatcher::rebuild_locked() {
    std::vector<HelpRequest> waiting;
    for (auto& r : registry_.live_requests())
        if (!r.is_reserved)
            waiting.push_back(std::move(r));
    std::stable_sort(waiting.begin(), waiting.end(), [](const auto& a, const auto& b) {
        return a.received_time < b.received_time;
    });
    queue_.clear();
    for (const auto& r : waiting)
        queue_.push_back(r.key());
    for (const auto& e : registry_.list_escs())
        record_esc_state_locked(e);
}

void Dispatcher::drain_locked(std::vector<Pending>& out) {
    while (!queue_.empty()) {
        const RequestKey key = queue_.front();
        if (!registry_.find_live(key)) {
            queue_.pop_front();
            continue;
        }
        auto p = try_assign_locked(key);
        if (!p)
            return;
        queue_.pop_front();
        out.push_back(std::move(*p));
    }
}

std::optional<Dispatcher::Pending> Dispatcher::try_assign_locked(const RequestKey& key) {
    std::vector<geo::Facility> free;
    for (const auto& e : registry_.list_escs())
        if (e.status == EscStatus::Free)
            free.push_back({e.id, e.location.point});
    if (free.empty())
        return std::nullopt;

    auto request = *registry_.find_live(key);
    const auto ranked = geo::rank_by_distance(request.location.point, free, radius_);
    const auto& nearest = ranked.front();
    const Timestamp at = clock_->now();
    registry_.reserve(key, nearest.id, at);
    request.is_reserved = true;
    request.terminal_id = nearest.id;
    request.assigned_at = at;

    if (own_.contains(key)) {
        --stats_.queued;
        ++stats_.live;
    }
    ++stats_.assignments;

    auto& ev = push_event_locked(DispatchEvent::Kind::Assign);
    ev.esc_id = nearest.id;
    ev.location = request.location.point;
    ev.key = key;
    ev.distance_km = nearest.distance.value;
    ev.at = at;

    return Pending{Assignment{key, nearest.id, nearest.distance, at}, std::move(request)};
}

void Dispatcher::record_esc_state_locked(const EscRecord& e) {
    auto& ev = push_event_locked(DispatchEvent::Kind::EscState);
    ev.esc_id = e.id;
    ev.location = e.location.point;
    ev.reserved = e.status == EscStatus::Reserved;
    ev.at = clock_->now();
}

DispatchEvent& Dispatcher::push_event_locked(DispatchEvent::Kind kind) {
    DispatchEvent ev;
    ev.seq = next_event_++;
    ev.kind = kind;
    events_.push_back(std::move(ev));
    return events_.back();
}

void Dispatcher::notify(const std::vector<Pending>& pending) {
    if (pending.empty())
        return;
    std::vector<AssignmentListener> listeners;
    {
        std::lock_guard lock(listeners_mutex_);
        listeners = listeners_;
    }
    for (const auto& p : pending)
        for (const auto& l : listeners)
            l(p.assignment, p.request);
}

std::vector<RequestView> Dispatcher::list_requests(StatusFilter filter) const {
    std::vector<RequestView> views;
    if (filter != StatusFilter::Handled)
        for (const auto& r : registry_.live_requests())
            views.push_back(view_of(r));
    if (filter != StatusFilter::New)
        for (const auto& h : registry_.handled_requests())
            views.push_back(view_of(h));
    return views;
}

std::optional<RequestState> Dispatcher::state_of(const RequestKey& key) const {
    if (auto r = registry_.find_live(key))
        return derive_state(*r);
    if (registry_.is_handled(key))
        return RequestState::Handled;
    return std::nullopt;
}

std::vector<DispatchEvent> Dispatcher::events(std::uint64_t since_seq) const {
    std::lock_guard lock(mutex_);
    std::vector<DispatchEvent> out;
    for (const auto& e : events_)
        if (e.seq > since_seq)
            out.push_back(e);
    return out;
}

DispatchStats Dispatcher::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

std::vector<RequestKey> Dispatcher::queued_keys() const {
    std::lock_guard lock(mutex_);
    return {queue_.begin(), queue_.end()};
}

}  // namespace succor
