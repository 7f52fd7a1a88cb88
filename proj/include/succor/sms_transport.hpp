#pragma once

#include "succor/timestamp.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace succor {

enum class DeliveryStatus { Pending, Sent, Failed };

std::string_view to_string(DeliveryStatus s);

struct SmsMessage {
    std::string to;
    std::string body;
    Timestamp created_at;
    DeliveryStatus delivery_status = DeliveryStatus::Pending;
    int attempts = 0;
};

/// One delivery attempt per call. Returns false (or throws) on failure.
/// Implementations must accept concurrent calls.
class SmsTransport {
public:
    virtual ~SmsTransport() = default;
    virtual bool send(const SmsMessage& msg) = 0;
};

/// In-memory fake: keeps every delivered message until drained.
class RecordingTransport final : public SmsTransport {
public:
    bool send(const SmsMessage& msg) override;

    /// Every send call fails while set.
    void set_always_fail(bool fail);
    /// The next `n` send calls fail, then delivery resumes.
    void fail_next(int n);

    std::vector<SmsMessage> drain();
    std::size_t delivered_count() const;
    std::size_t attempt_count() const;

private:
    mutable std::mutex mutex_;
    std::vector<SmsMessage> delivered_;
    std::size_t attempts_ = 0;
    bool always_fail_ = false;
    int fail_next_ = 0;
};

/// Appends one tab-separated line per message: created_at, to, body.
class FileTransport final : public SmsTransport {
public:
    explicit FileTransport(const std::filesystem::path& path);
    bool send(const SmsMessage& msg) override;

private:
    std::mutex mutex_;
    std::ofstream out_;
};

/// POSTs {"to": ..., "body": ...} as JSON to an HTTP SMS gateway; any 2xx
/// reply counts as delivered.
class HttpGatewayTransport final : public SmsTransport {
public:
    /// `url` is "http://host:port/path".
    explicit HttpGatewayTransport(std::string url);
    bool send(const SmsMessage& msg) override;

private:
    std::string base_;
    std::string path_;
};

/// "recording", "file:<path>" or an "http://host:port/path" gateway url.
std::shared_ptr<SmsTransport> make_transport(std::string_view selector);

}  // namespace succor
