#include "succor/sms_transport.hpp"

#include "succor/error.hpp"

#include <httplib.h>
#include <json.hpp>

namespace succor {

std::string_view to_string(DeliveryStatus s) {
    switch (s) {
    case DeliveryStatus::Pending: return "PENDING";
    case DeliveryStatus::Sent: return "SENT";
    case DeliveryStatus::Failed: return "FAILED";
    }
    return "?";
}

bool RecordingTransport::send(const SmsMessage& msg) {
    std::lock_guard lock(mutex_);
    ++attempts_;
    if (always_fail_)
        return false;
    if (fail_next_ > 0) {
        --fail_next_;
        return false;
    }
    delivered_.push_back(msg);
    delivered_.back().delivery_status = DeliveryStatus::Sent;
    return true;
}

void RecordingTransport::set_always_fail(bool fail) {
    std::lock_guard lock(mutex_);
    always_fail_ = fail;
}

void RecordingTransport::fail_next(int n) {
    std::lock_guard lock(mutex_);
    fail_next_ = n;
}

std::vector<SmsMessage> RecordingTransport::drain() {
    std::lock_guard lock(mutex_);
    return std::exchange(delivered_, {});
}

std::size_t RecordingTransport::delivered_count() const {
    std::lock_guard lock(mutex_);
    return delivered_.size();
}

std::size_t RecordingTransport::attempt_count() const {
    std::lock_guard lock(mutex_);
    return attempts_;
}

FileTransport::FileTransport(const std::filesystem::path& path) : out_(path, std::ios::app) {
    if (!out_)
        fail(ErrorCode::StorageFailure, "cannot open SMS log " + path.string());
}

bool FileTransport::send(const SmsMessage& msg) {
    std::lock_guard lock(mutex_);
    out_ << msg.created_at.str() << '\t' << msg.to << '\t' << msg.body << '\n';
    out_.flush();
    return bool(out_);
}

HttpGatewayTransport::HttpGatewayTransport(std::string url) {
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0)
        fail(ErrorCode::Validation, "SMS gateway url must start with http://");
    const auto slash = url.find('/', scheme.size());
    base_ = url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

bool HttpGatewayTransport::send(const SmsMessage& msg) {
    httplib::Client client(base_);
    client.set_connection_timeout(2);
    client.set_read_timeout(5);
    const nlohmann::json payload{{"to", msg.to}, {"body", msg.body}};
    const auto res = client.Post(path_, payload.dump(), "application/json");
    return res && res->status >= 200 && res->status < 300;
}

std::shared_ptr<SmsTransport> make_transport(std::string_view selector) {
    if (selector == "recording")
        return std::make_shared<RecordingTransport>();
    if (selector.rfind("file:", 0) == 0)
        return std::make_shared<FileTransport>(std::string(selector.substr(5)));
    if (selector.rfind("http://", 0) == 0)
        return std::make_shared<HttpGatewayTransport>(std::string(selector));
    fail(ErrorCode::Validation, "unknown SMS transport: " + std::string(selector));
}

}  // namespace succor
