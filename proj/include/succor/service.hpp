#pragma once

#include "succor/assignment_channel.hpp"
#include "succor/config.hpp"
#include "succor/dispatcher.hpp"
#include "succor/geocode.hpp"
#include "succor/notifier.hpp"
#include "succor/registry.hpp"
#include "succor/sms_transport.hpp"
#include "succor/worker_pool.hpp"

#include <atomic>
#include <memory>
#include <thread>

namespace httplib {
class Server;
}

namespace succor {

struct NotificationStats {
    std::uint64_t fan_outs = 0;
    std::uint64_t sent = 0;
    std::uint64_t failed = 0;
};

/// The HTTP/JSON service: registry + dispatcher + notifier behind one server.
///
/// Construction opens storage (Error{StorageFailure}) and loads fixtures;
/// bind() claims the port (Error{BindFailure}); run() or start() serves.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Returns the bound port (useful with port 0).
    int bind();
    /// Serves on the calling thread until stop().
    void run();
    /// Serves on a background thread.
    void start();
    /// Wakes long-polls, finishes in-flight replies, then stops listening.
    void stop();

    int port() const { return port_; }
    const ServiceConfig& config() const { return config_; }

    Registry& registry() { return *registry_; }
    Dispatcher& dispatcher() { return *dispatcher_; }
    AssignmentChannel& channel() { return channel_; }
    /// Non-null only when the configured transport is "recording".
    std::shared_ptr<RecordingTransport> recording_transport() const { return recording_; }

    void set_geocoder(std::shared_ptr<GeocodeProvider> provider);
    /// Blocks until queued SMS fan-outs have finished.
    void wait_notifications_idle() { fanout_pool_.wait_idle(); }
    NotificationStats notification_stats() const;

private:
    void routes();
    void on_assignment(const Assignment& a, const HelpRequest& req);

    ServiceConfig config_;
    std::unique_ptr<Registry> registry_;
    std::unique_ptr<Dispatcher> dispatcher_;
    std::shared_ptr<SmsTransport> transport_;
    std::shared_ptr<RecordingTransport> recording_;
    std::unique_ptr<Notifier> notifier_;
    std::shared_ptr<GeocodeProvider> geocoder_;
    std::mutex geocoder_mutex_;
    AssignmentChannel channel_;
    WorkerPool fanout_pool_{4};

    std::atomic<std::uint64_t> fan_outs_{0}, sms_sent_{0}, sms_failed_{0};

    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = -1;
};

}  // namespace succor
