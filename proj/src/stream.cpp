#include "gsim/stream.hpp"

#include "gsim/errors.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>

namespace gsim {

namespace {

void split_address(const std::string& address, std::string& host, int& port) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos) {
        throw DomainError("stream address must be host:port, got '" + address + "'");
    }
    host = address.substr(0, colon);
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
        throw DomainError("invalid port in stream address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw DomainError("port out of range in '" + address + "'");
}

}  // namespace

TelemetryPublisher::TelemetryPublisher(const std::string& address, PublisherOptions opts)
    : opts_(opts) {
    // A disconnected client racing a send() must not kill the process.
    ::signal(SIGPIPE, SIG_IGN);

    std::string host;
    int port = 0;
    split_address(address, host, port);

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError("socket() failed: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (host.empty() || host == "0.0.0.0") {
        addr.sin_addr.s_addr = INADDR_ANY;
    } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw DomainError("stream address host must be an IPv4 literal, got '" + host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const std::string err = std::strerror(errno);
        ::close(listen_fd_);
        throw IoError("bind(" + address + ") failed: " + err);
    }
    if (::listen(listen_fd_, 16) != 0) {
        const std::string err = std::strerror(errno);
        ::close(listen_fd_);
        throw IoError("listen failed: " + err);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    acceptor_ = std::thread(&TelemetryPublisher::accept_loop, this);
}

TelemetryPublisher::~TelemetryPublisher() { stop(); }

void TelemetryPublisher::accept_loop() {
    for (;;) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) return;  // listener closed during stop()
        // Bounds how long a sender can sit in send() on a stalled socket, so
        // stop() always terminates.
        timeval send_timeout{10, 0};
        ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &send_timeout, sizeof(send_timeout));
        auto client = std::make_unique<Client>();
        client->fd = fd;
        Client* raw = client.get();
        std::lock_guard<std::mutex> lock(clients_mutex_);
        if (stopping_) {
            ::close(fd);
            return;
        }
        // Registration shares the publish lock, so the client sees every
        // record published from this point on with none torn or skipped.
        clients_.push_back(std::move(client));
        raw->sender = std::thread(&TelemetryPublisher::sender_loop, this, raw);
    }
}

void TelemetryPublisher::sender_loop(Client* client) {
    for (;;) {
        std::string line;
        {
            std::unique_lock<std::mutex> lock(client->mutex);
            client->cv.wait(lock, [client] { return client->dead || !client->queue.empty(); });
            if (client->queue.empty()) return;  // dead with nothing left to drain
            if (client->dead && client->overflowed) return;
            line = std::move(client->queue.front());
            client->queue.pop_front();
        }
        std::size_t sent = 0;
        while (sent < line.size()) {
            const ssize_t n = ::send(client->fd, line.data() + sent, line.size() - sent, 0);
            if (n <= 0) {
                if (n < 0 && errno == EINTR) continue;
                std::lock_guard<std::mutex> lock(client->mutex);
                client->dead = true;
                client->queue.clear();
                return;
            }
            sent += static_cast<std::size_t>(n);
        }
    }
}

void TelemetryPublisher::publish(const std::string& line) {
    std::lock_guard<std::mutex> clients_lock(clients_mutex_);
    for (auto& client : clients_) {
        std::lock_guard<std::mutex> lock(client->mutex);
        if (client->dead) continue;
        if (client->queue.size() >= opts_.max_queue) {
            client->dead = true;
            client->overflowed = true;
            ++dropped_;
            // Unblocks a sender stuck in send() on a stalled socket.
            ::shutdown(client->fd, SHUT_RDWR);
            client->cv.notify_all();
            continue;
        }
        client->queue.push_back(line);
        client->cv.notify_all();
    }
}

std::size_t TelemetryPublisher::clients_dropped() const {
    std::lock_guard<std::mutex> lock(clients_mutex_);
    return dropped_;
}

void TelemetryPublisher::stop() {
    {
        std::lock_guard<std::mutex> lock(clients_mutex_);
        if (stopping_) return;
        stopping_ = true;
    }
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable()) acceptor_.join();

    std::vector<std::unique_ptr<Client>> clients;
    {
        std::lock_guard<std::mutex> lock(clients_mutex_);
        clients.swap(clients_);
    }
    for (auto& client : clients) {
        {
            std::lock_guard<std::mutex> lock(client->mutex);
            client->dead = true;  // sender drains the queue, then exits
            client->cv.notify_all();
        }
        if (client->sender.joinable()) client->sender.join();
        ::close(client->fd);
    }
}

}  // namespace gsim
