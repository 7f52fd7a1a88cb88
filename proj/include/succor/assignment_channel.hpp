#pragma once

#include "succor/records.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace succor {

/// What an ESC terminal is told about a new assignment.
struct AssignmentNotice {
    RequestKey key;
    std::string esc_id;
    std::string patient_name;
    std::string disease_name;
    Location location;
    double distance_km = 0.0;
    Timestamp assigned_at;
};

/// Per-ESC mailboxes for the long-poll channel. Notices published while no
/// terminal is polling wait in the mailbox; a poll hands over and removes
/// everything pending, so each notice is delivered exactly once.
class AssignmentChannel {
public:
    void publish(AssignmentNotice notice);

    /// Waits up to `timeout` for at least one notice. Returns early, possibly
    /// empty, after shutdown().
    std::vector<AssignmentNotice> poll(const std::string& esc_id,
                                       std::chrono::milliseconds timeout);

    std::size_t pending(const std::string& esc_id) const;

    /// Wakes every waiting poll; later polls return immediately.
    void shutdown();

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::map<std::string, std::deque<AssignmentNotice>> mailboxes_;
    bool closed_ = false;
};

}  // namespace succor
