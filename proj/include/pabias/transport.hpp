#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "pabias/psusim.hpp"

namespace pabias::transport {

/// Ordered, reliable carrier of fixed-size frames.
class FrameLink {
public:
    virtual ~FrameLink() = default;
    virtual void send(const psusim::WireBytes& frame) = 0;
    /// Waits up to `timeout` for the next frame.
    virtual std::optional<psusim::WireBytes> receive(std::chrono::milliseconds timeout) = 0;
};

/// Thread-safe FIFO of frames; one direction of an in-process link.
class FrameQueue {
public:
    void push(const psusim::WireBytes& frame);
    std::optional<psusim::WireBytes> pop(std::chrono::milliseconds timeout);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<psusim::WireBytes> frames_;
};

class QueueLink : public FrameLink {
public:
    QueueLink(std::shared_ptr<FrameQueue> tx, std::shared_ptr<FrameQueue> rx)
        : tx_(std::move(tx)), rx_(std::move(rx)) {}

    void send(const psusim::WireBytes& frame) override { tx_->push(frame); }
    std::optional<psusim::WireBytes> receive(std::chrono::milliseconds timeout) override {
        return rx_->pop(timeout);
    }

private:
    std::shared_ptr<FrameQueue> tx_;
    std::shared_ptr<FrameQueue> rx_;
};

/// Two connected endpoints (controller side, supply side).
std::pair<std::unique_ptr<QueueLink>, std::unique_ptr<QueueLink>> make_link_pair();

/// Splits "host:port"; IPv4 dotted quad or "localhost".
std::pair<std::string, std::uint16_t> parse_address(const std::string& address);

/// TCP stream carrying back-to-back 13-byte frames.
class TcpLink : public FrameLink {
public:
    explicit TcpLink(int fd) : fd_(fd) {}
    ~TcpLink() override;
    TcpLink(const TcpLink&) = delete;
    TcpLink& operator=(const TcpLink&) = delete;

    static std::unique_ptr<TcpLink> connect(const std::string& host, std::uint16_t port);

    void send(const psusim::WireBytes& frame) override;
    std::optional<psusim::WireBytes> receive(std::chrono::milliseconds timeout) override;

    bool closed() const noexcept { return closed_; }

private:
    int fd_ = -1;
    bool closed_ = false;
};

/// Hosts a simulated supply on a listening socket. Each frame is stepped
/// through psu_step with the wall-clock time since the previous frame.
class PsuTcpServer {
public:
    PsuTcpServer(const std::string& host, std::uint16_t port, psusim::PsuState initial);
    ~PsuTcpServer();
    PsuTcpServer(const PsuTcpServer&) = delete;
    PsuTcpServer& operator=(const PsuTcpServer&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    /// Serves clients one at a time until `max_clients` have disconnected
    /// (0 = forever) or stop() is called.
    void serve(int max_clients = 0);
    void stop() noexcept { stopping_ = true; }

    psusim::PsuState state() const;

private:
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    mutable std::mutex state_mutex_;
    psusim::PsuState state_;
};

}  // namespace pabias::transport
