#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>

namespace scicheck {

// Append-only JSON-lines log. Each append is written with a single write()
// and fsynced before returning, so a crash can only leave a torn last line,
// which replay discards.
class Journal {
public:
    explicit Journal(std::filesystem::path path);
    ~Journal();
    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    // Calls fn for every complete entry in order and truncates a torn tail.
    // A malformed complete line throws Error naming the line.
    void replay(const std::function<void(const nlohmann::json&)>& fn);
    void append(const nlohmann::json& entry);
    // Empties the journal (after its contents were captured in a snapshot).
    void reset();

    std::size_t entries() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    void open_fd();

    std::filesystem::path path_;
    mutable std::mutex mu_;
    int fd_ = -1;
    std::size_t entries_ = 0;
};

// fsyncs a directory so that created or renamed entries survive a crash.
void sync_directory(const std::filesystem::path& dir);

}  // namespace scicheck
