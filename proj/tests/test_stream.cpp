#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsim/errors.hpp"
#include "gsim/stream.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <string>
#include <thread>

using namespace gsim;

namespace {

int connect_client(int port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    return fd;
}

// Reads until EOF, optionally sleeping between reads to emulate a slow client.
std::string drain(int fd, int sleep_ms_per_read = 0, int read_size = 4096) {
    std::string out;
    std::vector<char> buf(static_cast<std::size_t>(read_size));
    for (;;) {
        const ssize_t n = ::read(fd, buf.data(), buf.size());
        if (n <= 0) break;
        out.append(buf.data(), static_cast<std::size_t>(n));
        if (sleep_ms_per_read > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms_per_read));
        }
    }
    ::close(fd);
    return out;
}

void wait_briefly() { std::this_thread::sleep_for(std::chrono::milliseconds(50)); }

}  // namespace

TEST_CASE("a single client receives every record in order") {
    TelemetryPublisher pub("127.0.0.1:0");
    const int fd = connect_client(pub.port());
    wait_briefly();

    std::string expected;
    for (int i = 0; i < 100; ++i) {
        const std::string line = "{\"frame_id\":" + std::to_string(i) + "}\n";
        expected += line;
        pub.publish(line);
    }
    std::string received;
    std::thread reader([&] { received = drain(fd); });
    pub.stop();
    reader.join();
    CHECK(received == expected);
}

TEST_CASE("two clients see byte-identical streams") {
    TelemetryPublisher pub("127.0.0.1:0");
    const int fd1 = connect_client(pub.port());
    const int fd2 = connect_client(pub.port());
    wait_briefly();

    std::string expected;
    for (int i = 0; i < 100; ++i) {
        const std::string line = "{\"frame_id\":" + std::to_string(i) + ",\"x\":1.5}\n";
        expected += line;
        pub.publish(line);
    }
    std::string r1, r2;
    std::thread t1([&] { r1 = drain(fd1); });
    std::thread t2([&] { r2 = drain(fd2); });
    pub.stop();
    t1.join();
    t2.join();
    CHECK(r1 == expected);
    CHECK(r2 == expected);
}

TEST_CASE("a late client receives records from connection time onward") {
    TelemetryPublisher pub("127.0.0.1:0");
    for (int i = 0; i < 5; ++i) pub.publish("early\n");
    const int fd = connect_client(pub.port());
    wait_briefly();
    pub.publish("late\n");
    std::string received;
    std::thread reader([&] { received = drain(fd); });
    pub.stop();
    reader.join();
    CHECK(received == "late\n");
}

TEST_CASE("a stalled client is disconnected without disturbing the fast one") {
    PublisherOptions opts;
    opts.max_queue = 8;
    TelemetryPublisher pub("127.0.0.1:0", opts);

    const int fast_fd = connect_client(pub.port());
    const int slow_fd = connect_client(pub.port());
    wait_briefly();

    // Lines large enough to fill the socket buffers quickly.
    const std::string payload(8192, 'x');
    std::string expected;
    std::string fast_received, slow_received;
    std::thread fast_reader([&] { fast_received = drain(fast_fd); });
    std::thread slow_reader([&] { slow_received = drain(slow_fd, 20, 512); });

    const int total = 800;
    for (int i = 0; i < total; ++i) {
        const std::string line = std::to_string(i) + ":" + payload + "\n";
        expected += line;
        pub.publish(line);
    }
    // The slow client must have overflowed its queue by now or shortly after.
    for (int i = 0; i < 100 && pub.clients_dropped() == 0; ++i) wait_briefly();
    CHECK(pub.clients_dropped() == 1);

    pub.stop();
    fast_reader.join();
    slow_reader.join();
    CHECK(fast_received == expected);
    CHECK(slow_received.size() < expected.size());
    // What the slow client did receive is a clean prefix: no torn records.
    CHECK(expected.compare(0, slow_received.size(), slow_received) == 0);
}

TEST_CASE("binding an occupied port fails with IoError") {
    TelemetryPublisher pub("127.0.0.1:0");
    CHECK_THROWS_AS(TelemetryPublisher("127.0.0.1:" + std::to_string(pub.port())), IoError);
    pub.stop();
}

TEST_CASE("malformed addresses are domain errors") {
    CHECK_THROWS_AS(TelemetryPublisher("no-port-here"), DomainError);
    CHECK_THROWS_AS(TelemetryPublisher("127.0.0.1:99999"), DomainError);
    CHECK_THROWS_AS(TelemetryPublisher("not-an-ip:1234"), DomainError);
}
