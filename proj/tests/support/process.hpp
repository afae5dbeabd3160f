#pragma once

// Runs child processes with captured output.

#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace test_support {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

namespace detail {

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline pid_t spawn(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
                   const std::filesystem::path& in, const std::filesystem::path& out, const std::filesystem::path& err) {
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        const int fin = ::open(in.empty() ? "/dev/null" : in.c_str(), O_RDONLY);
        const int fout = ::open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        const int ferr = ::open(err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        ::dup2(fin, 0);
        ::dup2(fout, 1);
        ::dup2(ferr, 2);
        for (const auto& [k, v] : env) ::setenv(k.c_str(), v.c_str(), 1);
        std::vector<char*> argv;
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        ::execv(argv[0], argv.data());
        ::_exit(127);
    }
    return pid;
}

}  // namespace detail

// Runs to completion. `input` is fed on stdin.
inline ProcessResult run_process(const std::vector<std::string>& args, const std::string& input = "",
                                 const std::map<std::string, std::string>& env = {}) {
    char tmpl[] = "/tmp/scicheck-proc-XXXXXX";
    const std::filesystem::path dir = ::mkdtemp(tmpl);
    std::ofstream(dir / "in", std::ios::binary) << input;
    const pid_t pid = detail::spawn(args, env, dir / "in", dir / "out", dir / "err");
    int status = 0;
    ::waitpid(pid, &status, 0);
    ProcessResult r{WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status), detail::slurp(dir / "out"),
                    detail::slurp(dir / "err")};
    std::filesystem::remove_all(dir);
    return r;
}

// A long-running child (e.g. the server). Output goes to files in `log_dir`.
class ChildProcess {
public:
    ChildProcess(const std::vector<std::string>& args, const std::filesystem::path& log_dir,
                 const std::map<std::string, std::string>& env = {})
        : out_(log_dir / "child.out"), err_(log_dir / "child.err") {
        pid_ = detail::spawn(args, env, {}, out_, err_);
    }
    ~ChildProcess() {
        if (pid_ > 0) kill(SIGKILL);
    }
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    // Waits for the first stdout line (the server prints its address).
    std::string first_line(std::chrono::milliseconds timeout = std::chrono::seconds(20)) const {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (std::chrono::steady_clock::now() < deadline) {
            const std::string s = detail::slurp(out_);
            if (auto nl = s.find('\n'); nl != std::string::npos) return s.substr(0, nl);
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        throw std::runtime_error("child printed nothing; stderr: " + detail::slurp(err_));
    }

    // Sends `sig` and reaps; returns the exit code (128 + signal when killed).
    int kill(int sig) {
        ::kill(pid_, sig);
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    }

    std::string err() const { return detail::slurp(err_); }

private:
    std::filesystem::path out_, err_;
    pid_t pid_ = -1;
};

// A loopback port that was free a moment ago.
inline int free_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::close(fd);
    return ntohs(addr.sin_port);
}

}  // namespace test_support
