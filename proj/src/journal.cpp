#include "scicheck/journal.hpp"

#include "scicheck/error.hpp"
#include "scicheck/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <system_error>

namespace scicheck {

using json = nlohmann::json;

void sync_directory(const std::filesystem::path& dir) {
    int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {
    const bool existed = std::filesystem::exists(path_);
    open_fd();
    if (!existed) sync_directory(path_.parent_path());
}

Journal::~Journal() {
    if (fd_ >= 0) ::close(fd_);
}

void Journal::open_fd() {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "open " + path_.string());
}

void Journal::replay(const std::function<void(const json&)>& fn) {
    std::lock_guard lock(mu_);
    const std::string content = read_file(path_);
    std::size_t pos = 0;
    std::size_t line = 0;
    entries_ = 0;
    while (pos < content.size()) {
        const std::size_t nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            if (::ftruncate(fd_, static_cast<off_t>(pos)) != 0)
                throw std::system_error(errno, std::generic_category(), "truncate " + path_.string());
            ::fsync(fd_);
            break;
        }
        ++line;
        json entry;
        try {
            entry = json::parse(std::string_view(content).substr(pos, nl - pos));
        } catch (const json::parse_error& e) {
            throw ParseError(line, path_.filename().string() + ": corrupt journal entry: " + e.what());
        }
        fn(entry);
        ++entries_;
        pos = nl + 1;
    }
}

void Journal::append(const json& entry) {
    const std::string line = entry.dump() + "\n";
    std::lock_guard lock(mu_);
    std::size_t done = 0;
    while (done < line.size()) {
        ssize_t n = ::write(fd_, line.data() + done, line.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::system_error(errno, std::generic_category(), "append " + path_.string());
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) throw std::system_error(errno, std::generic_category(), "fsync " + path_.string());
    ++entries_;
}

void Journal::reset() {
    std::lock_guard lock(mu_);
    if (::ftruncate(fd_, 0) != 0) throw std::system_error(errno, std::generic_category(), "truncate " + path_.string());
    ::fsync(fd_);
    entries_ = 0;
}

std::size_t Journal::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

}  // namespace scicheck
