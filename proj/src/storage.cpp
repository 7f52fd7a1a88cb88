#include "succor/storage.hpp"

#include "succor/error.hpp"

#include <fstream>
#include <sstream>

#include <unistd.h>

namespace succor {

void MemoryBackend::append(std::string_view record) {
    std::lock_guard lock(mutex_);
    records_.emplace_back(record);
}

std::vector<std::string> MemoryBackend::load() {
    std::lock_guard lock(mutex_);
    return records_;
}

namespace {

// Length of the prefix made of complete ('\n'-terminated) lines.
std::uintmax_t complete_prefix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uintmax_t end = 0, pos = 0;
    char c;
    while (in.get(c)) {
        ++pos;
        if (c == '\n')
            end = pos;
    }
    return end;
}

}  // namespace

JournalFileBackend::JournalFileBackend(std::filesystem::path path, bool sync_each_append)
    : path_(std::move(path)), sync_(sync_each_append) {
    std::error_code ec;
    if (std::filesystem::exists(path_, ec)) {
        const auto keep = complete_prefix(path_);
        if (keep != std::filesystem::file_size(path_, ec))
            std::filesystem::resize_file(path_, keep, ec);
        if (ec)
            fail(ErrorCode::StorageFailure, "cannot repair journal " + path_.string());
    }
    file_ = std::fopen(path_.c_str(), "ab");
    if (!file_)
        fail(ErrorCode::StorageFailure, "cannot open journal " + path_.string());
}

JournalFileBackend::~JournalFileBackend() {
    if (file_)
        std::fclose(file_);
}

void JournalFileBackend::append(std::string_view record) {
    std::lock_guard lock(mutex_);
    const bool ok = std::fwrite(record.data(), 1, record.size(), file_) == record.size() &&
                    std::fputc('\n', file_) != EOF && std::fflush(file_) == 0 &&
                    (!sync_ || ::fsync(::fileno(file_)) == 0);
    if (!ok)
        fail(ErrorCode::StorageFailure, "journal write failed: " + path_.string());
}

std::vector<std::string> JournalFileBackend::load() {
    std::lock_guard lock(mutex_);
    std::ifstream in(path_, std::ios::binary);
    std::vector<std::string> records;
    std::string line;
    while (std::getline(in, line)) {
        if (in.eof())
            break;  // no trailing newline: torn write
        if (!line.empty())
            records.push_back(std::move(line));
    }
    return records;
}

std::unique_ptr<StorageBackend> open_backend(std::string_view selector) {
    if (selector == "memory")
        return std::make_unique<MemoryBackend>();
    constexpr std::string_view prefix = "file:";
    if (selector.substr(0, prefix.size()) == prefix && selector.size() > prefix.size())
        return std::make_unique<JournalFileBackend>(std::string(selector.substr(prefix.size())));
    fail(ErrorCode::StorageFailure, "unknown storage selector: " + std::string(selector));
}

}  // namespace succor
