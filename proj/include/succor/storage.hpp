#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace succor {

/// Append-only record journal behind the registry. `append` returns only
/// once the record is as durable as the backend can make it; `load` yields
/// every complete record in append order.
class StorageBackend {
public:
    virtual ~StorageBackend() = default;

    virtual void append(std::string_view record) = 0;
    virtual std::vector<std::string> load() = 0;
};

class MemoryBackend final : public StorageBackend {
public:
    void append(std::string_view record) override;
    std::vector<std::string> load() override;

private:
    std::mutex mutex_;
    std::vector<std::string> records_;
};

/// Newline-delimited write-ahead journal on disk. A torn final line (crash
/// mid-append) is dropped on load and truncated away before new appends.
class JournalFileBackend final : public StorageBackend {
public:
    /// Throws Error{StorageFailure} if the file cannot be opened for append.
    explicit JournalFileBackend(std::filesystem::path path, bool sync_each_append = true);
    ~JournalFileBackend() override;

    JournalFileBackend(const JournalFileBackend&) = delete;
    JournalFileBackend& operator=(const JournalFileBackend&) = delete;

    void append(std::string_view record) override;
    std::vector<std::string> load() override;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    bool sync_;
    std::mutex mutex_;
    std::FILE* file_ = nullptr;
};

/// "memory" or "file:<path>".
std::unique_ptr<StorageBackend> open_backend(std::string_view selector);

}  // namespace succor
