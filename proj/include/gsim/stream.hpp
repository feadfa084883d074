#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gsim {

struct PublisherOptions {
    std::size_t max_queue = 1024;  // per-client; overflow disconnects the client
};

// Publishes newline-delimited telemetry lines to any number of TCP clients.
// Every client receives every line published after it connected, in order.
// A client whose queue overflows is disconnected rather than silently losing
// records; other clients are unaffected.
class TelemetryPublisher {
public:
    // address is "host:port"; port 0 picks an ephemeral port.
    TelemetryPublisher(const std::string& address, PublisherOptions opts = {});
    ~TelemetryPublisher();

    TelemetryPublisher(const TelemetryPublisher&) = delete;
    TelemetryPublisher& operator=(const TelemetryPublisher&) = delete;

    void publish(const std::string& line);
    void stop();  // closes the listener and all clients after draining queues

    int port() const { return port_; }
    std::size_t clients_dropped() const;

private:
    struct Client {
        int fd = -1;
        std::deque<std::string> queue;
        bool dead = false;
        bool overflowed = false;
        std::thread sender;
        std::mutex mutex;
        std::condition_variable cv;
    };

    void accept_loop();
    void sender_loop(Client* client);

    int listen_fd_ = -1;
    int port_ = 0;
    PublisherOptions opts_;
    std::thread acceptor_;
    mutable std::mutex clients_mutex_;
    std::vector<std::unique_ptr<Client>> clients_;
    std::size_t dropped_ = 0;
    bool stopping_ = false;
};

}  // namespace gsim
