#include "succor/assignment_channel.hpp"

namespace succor {

void AssignmentChannel::publish(AssignmentNotice notice) {
    {
        std::lock_guard lock(mutex_);
        mailboxes_[notice.esc_id].push_back(std::move(notice));
    }
    cv_.notify_all();
}

std::vector<AssignmentNotice> AssignmentChannel::poll(const std::string& esc_id,
                                                      std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] {
        if (closed_)
            return true;
        auto it = mailboxes_.find(esc_id);
        return it != mailboxes_.end() && !it->second.empty();
    });
    std::vector<AssignmentNotice> out;
    if (auto it = mailboxes_.find(esc_id); it != mailboxes_.end()) {
        out.assign(std::make_move_iterator(it->second.begin()),
                   std::make_move_iterator(it->second.end()));
        it->second.clear();
    }
    return out;
}

std::size_t AssignmentChannel::pending(const std::string& esc_id) const {
    std::lock_guard lock(mutex_);
    auto it = mailboxes_.find(esc_id);
    return it == mailboxes_.end() ? 0 : it->second.size();
}

void AssignmentChannel::shutdown() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

}  // namespace succor
