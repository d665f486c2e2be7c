#include "pabias/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <vector>

#include "pabias/error.hpp"

namespace pabias::transport {
namespace {

[[noreturn]] void sys_fail(const std::string& what) {
    throw Error(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    const std::string h = host == "localhost" ? "127.0.0.1" : host;
    if (inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1) {
        throw Error(ErrorCode::InvalidArgument, "not an IPv4 address: " + host);
    }
    return addr;
}

// Reads exactly n bytes; false on orderly close before any byte arrives.
bool read_exact(int fd, std::uint8_t* out, std::size_t n, bool& closed) {
    std::size_t got = 0;
    while (got < n) {
        const ssize_t r = ::recv(fd, out + got, n - got, 0);
        if (r == 0) {
            closed = true;
            return false;
        }
        if (r < 0) {
            if (errno == EINTR) continue;
            sys_fail("recv");
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

}  // namespace

void FrameQueue::push(const psusim::WireBytes& frame) {
    {
        std::lock_guard lock(mutex_);
        frames_.push_back(frame);
    }
    ready_.notify_one();
}

std::optional<psusim::WireBytes> FrameQueue::pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!ready_.wait_for(lock, timeout, [&] { return !frames_.empty(); })) {
        return std::nullopt;
    }
    auto frame = frames_.front();
    frames_.pop_front();
    return frame;
}

std::size_t FrameQueue::size() const {
    std::lock_guard lock(mutex_);
    return frames_.size();
}

std::pair<std::unique_ptr<QueueLink>, std::unique_ptr<QueueLink>> make_link_pair() {
    auto a_to_b = std::make_shared<FrameQueue>();
    auto b_to_a = std::make_shared<FrameQueue>();
    return {std::make_unique<QueueLink>(a_to_b, b_to_a), std::make_unique<QueueLink>(b_to_a, a_to_b)};
}

std::pair<std::string, std::uint16_t> parse_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0) {
        throw Error(ErrorCode::InvalidArgument, "expected host:port, got '" + address + "'");
    }
    int port = -1;
    try {
        std::size_t used = 0;
        port = std::stoi(address.substr(colon + 1), &used);
        if (used != address.size() - colon - 1) port = -1;
    } catch (const std::exception&) {
        port = -1;
    }
    if (port < 0 || port > 65535) {
        throw Error(ErrorCode::InvalidArgument, "bad port in '" + address + "'");
    }
    return {address.substr(0, colon), static_cast<std::uint16_t>(port)};
}

TcpLink::~TcpLink() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpLink> TcpLink::connect(const std::string& host, std::uint16_t port) {
    const sockaddr_in addr = make_addr(host, port);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sys_fail("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        sys_fail("connect " + host + ":" + std::to_string(port));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<TcpLink>(fd);
}

void TcpLink::send(const psusim::WireBytes& frame) {
    std::size_t sent = 0;
    while (sent < frame.size()) {
        const ssize_t w = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            sys_fail("send");
        }
        sent += static_cast<std::size_t>(w);
    }
}

std::optional<psusim::WireBytes> TcpLink::receive(std::chrono::milliseconds timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (ready < 0) sys_fail("poll");
    if (ready == 0) return std::nullopt;
    psusim::WireBytes frame{};
    if (!read_exact(fd_, frame.data(), frame.size(), closed_)) {
        return std::nullopt;
    }
    return frame;
}

PsuTcpServer::PsuTcpServer(const std::string& host, std::uint16_t port, psusim::PsuState initial)
    : state_(initial) {
    const sockaddr_in addr = make_addr(host, port);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) sys_fail("socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        const int saved = errno;
        ::close(listen_fd_);
        errno = saved;
        sys_fail("bind " + host + ":" + std::to_string(port));
    }
    if (::listen(listen_fd_, 4) != 0) sys_fail("listen");
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

PsuTcpServer::~PsuTcpServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

psusim::PsuState PsuTcpServer::state() const {
    std::lock_guard lock(state_mutex_);
    return state_;
}

void PsuTcpServer::serve(int max_clients) {
    using clock = std::chrono::steady_clock;
    int served = 0;
    auto last = clock::now();
    while (!stopping_ && (max_clients == 0 || served < max_clients)) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 50);
        if (ready < 0) {
            if (errno == EINTR) continue;
            sys_fail("poll");
        }
        if (ready == 0) continue;
        const int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) continue;

        TcpLink link(client);
        while (!stopping_ && !link.closed()) {
            auto frame = link.receive(std::chrono::milliseconds(50));
            if (!frame) continue;
            const auto now = clock::now();
            // Floor the step so back-to-back frames still satisfy dt > 0.
            const double dt = std::max(std::chrono::duration<double>(now - last).count(), 1e-6);
            last = now;
            const std::vector<std::vector<std::uint8_t>> in{{frame->begin(), frame->end()}};
            psusim::StepResult step;
            {
                std::lock_guard lock(state_mutex_);
                step = psusim::psu_step(state_, dt, in);
                state_ = step.state;
            }
            for (const auto& out : step.outgoing) {
                link.send(out);
            }
        }
        ++served;
    }
}

}  // namespace pabias::transport
