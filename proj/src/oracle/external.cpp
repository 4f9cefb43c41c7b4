#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "molexp/oracle/external.hpp"
#include "molexp/oracle/similarity.hpp"

namespace molexp::oracle {

ExternalOracle::ExternalOracle(ExternalOracleConfig config) : config_(std::move(config)) {
    // Writes to a dead child must surface as EPIPE, not SIGPIPE.
    static const bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;
}

ExternalOracle::~ExternalOracle() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (pid_ > 0) {
        ::kill(pid_, SIGTERM);
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
}

void ExternalOracle::spawn() {
    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
        throw OracleError(OracleError::Kind::SpawnFailure, "pipe() failed");
    const int pid = ::fork();
    if (pid < 0) throw OracleError(OracleError::Kind::SpawnFailure, "fork() failed");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", config_.command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

std::string ExternalOracle::read_line() {
    const int timeout_ms = static_cast<int>(config_.timeout_s * 1000.0);
    for (;;) {
        const auto pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        struct pollfd pfd{from_child_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, timeout_ms);
        if (rc == 0)
            throw OracleError(OracleError::Kind::Timeout,
                              "external oracle timed out after " + std::to_string(config_.timeout_s) + "s");
        if (rc < 0) throw OracleError(OracleError::Kind::SpawnFailure, "poll() failed");
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n <= 0)
            throw OracleError(OracleError::Kind::MalformedOutput, "external oracle closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

double ExternalOracle::score(const std::string& smiles) {
    return score_batch({smiles}).front();
}

std::vector<double> ExternalOracle::score_batch(const std::vector<std::string>& smiles) {
    if (pid_ < 0) spawn();
    std::string payload;
    for (const auto& s : smiles) {
        payload += s;
        payload += '\n';
    }
    std::size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = ::write(to_child_, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw OracleError(OracleError::Kind::MalformedOutput, "external oracle process died");
        }
        written += static_cast<std::size_t>(n);
    }
    std::vector<double> scores;
    scores.reserve(smiles.size());
    for (std::size_t i = 0; i < smiles.size(); ++i) {
        const std::string line = read_line();
        char* end = nullptr;
        const double value = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || value < 0.0 || value > 1.0 || !std::isfinite(value))
            throw OracleError(OracleError::Kind::MalformedOutput,
                              "external oracle produced non-score line: '" + line + "'");
        scores.push_back(value);
    }
    return scores;
}

}  // namespace molexp::oracle
