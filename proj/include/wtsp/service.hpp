#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace wtsp::service {

inline constexpr std::size_t kMinPoints = 2;
inline constexpr std::size_t kMaxPoints = 2000;
inline constexpr double kMaxBudgetMs = 60'000.0;
inline constexpr std::size_t kMaxGridPoints = 2000;
/// Wall-clock cap for iterative methods when a request names no budget.
inline constexpr double kDefaultBudgetMs = 30'000.0;
inline constexpr int kDefaultPort = 8080;

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Caps simultaneous heavy solves; waiters are admitted in arrival order.
class FifoGate {
public:
    explicit FifoGate(std::size_t capacity);

    class Permit {
    public:
        explicit Permit(FifoGate& gate);
        ~Permit();
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;

    private:
        FifoGate& gate_;
    };

    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] std::size_t active() const;

private:
    void acquire();
    void release();

    std::size_t capacity_;
    std::size_t active_ = 0;
    std::uint64_t next_ticket_ = 0;
    std::uint64_t serving_ = 0;
    mutable std::mutex mu_;
    std::condition_variable cv_;
};

/// Request handlers, independent of the HTTP transport.
[[nodiscard]] Response handle_solve(std::string_view body, FifoGate* gate = nullptr);
[[nodiscard]] Response handle_methods();
[[nodiscard]] Response handle_grid(std::string_view body);
[[nodiscard]] Response handle_health();

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = kDefaultPort;
    /// Allowed cross-origin caller; defaults to http://localhost:<port>.
    std::optional<std::string> cors_origin;
    std::filesystem::path static_dir = "web";
    std::size_t max_concurrent_solves = 0;

    [[nodiscard]] std::string effective_origin() const;
};

class Server {
public:
    explicit Server(ServiceConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the socket; with port 0 an ephemeral port is chosen. Returns the
    /// bound port.
    int bind();
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();
    [[nodiscard]] int port() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace wtsp::service
