#include "scicheck/text.hpp"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <mutex>

extern char** environ;

namespace scicheck {

struct ExternalExtractor::Gate {
    std::mutex mu;
    std::condition_variable cv;
    std::size_t available;
};

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

ProcessResult run_shell(const std::string& command) {
    int out_pipe[2], err_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw std::runtime_error("pipe failed");
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        throw std::runtime_error("pipe failed");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

    std::string sh = "/bin/sh", dash_c = "-c", cmd = command;
    std::array<char*, 4> argv{sh.data(), dash_c.data(), cmd.data(), nullptr};
    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    if (rc != 0) {
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        throw std::runtime_error(std::string("posix_spawn failed: ") + std::strerror(rc));
    }

    ProcessResult result;
    std::array<pollfd, 2> fds{pollfd{out_pipe[0], POLLIN, 0}, pollfd{err_pipe[0], POLLIN, 0}};
    std::array<std::string*, 2> sinks{&result.out, &result.err};
    int open_fds = 2;
    char buf[8192];
    while (open_fds > 0) {
        if (::poll(fds.data(), fds.size(), -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (std::size_t k = 0; k < fds.size(); ++k) {
            if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const ssize_t n = ::read(fds[k].fd, buf, sizeof buf);
            if (n > 0) {
                sinks[k]->append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EINTR) {
                ::close(fds[k].fd);
                fds[k].fd = -1;
                --open_fds;
            }
        }
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {}
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

std::string excerpt(const std::string& s) {
    constexpr std::size_t kMax = 512;
    return s.size() <= kMax ? s : s.substr(0, kMax) + "...";
}

}  // namespace

ExternalExtractor::ExternalExtractor(std::string command_template, std::size_t max_concurrent)
    : template_(std::move(command_template)), gate_(std::make_unique<Gate>()) {
    if (template_.find("{input}") == std::string::npos) {
        throw std::invalid_argument("external tool template must contain {input}");
    }
    gate_->available = max_concurrent == 0 ? 1 : max_concurrent;
}

ExternalExtractor::~ExternalExtractor() = default;

TextDocument ExternalExtractor::run(const MediaId& media_id, const std::filesystem::path& input) const {
    std::string command = template_;
    const std::string quoted = shell_quote(input.string());
    for (std::size_t pos = command.find("{input}"); pos != std::string::npos;
         pos = command.find("{input}", pos + quoted.size())) {
        command.replace(pos, 7, quoted);
    }

    ProcessResult result;
    {
        std::unique_lock lock(gate_->mu);
        gate_->cv.wait(lock, [&] { return gate_->available > 0; });
        --gate_->available;
    }
    try {
        result = run_shell(command);
    } catch (...) {
        std::lock_guard lock(gate_->mu);
        ++gate_->available;
        gate_->cv.notify_one();
        throw;
    }
    {
        std::lock_guard lock(gate_->mu);
        ++gate_->available;
    }
    gate_->cv.notify_one();

    if (result.exit_code != 0) {
        throw ExternalToolError("external tool exited with status " + std::to_string(result.exit_code) + ": " +
                                    excerpt(result.err),
                                excerpt(result.err), result.exit_code);
    }
    if (!is_valid_utf8(result.out)) {
        throw ExternalToolError("external tool produced non-UTF-8 output: " + excerpt(result.err),
                                excerpt(result.err), result.exit_code);
    }
    TextDocument doc = extract_plain(media_id, result.out);
    doc.source_format = SourceFormat::External;
    return doc;
}

TextDocument run_external_extractor(const MediaId& media_id, const std::filesystem::path& input,
                                    const std::string& command_template) {
    return ExternalExtractor(command_template).run(media_id, input);
}

}  // namespace scicheck
