#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>

#include "softnash/config.hpp"

namespace softnash {

struct ServerOptions {
  std::uint16_t port = 8080;  // 0 picks an ephemeral port
  std::string address = "127.0.0.1";
  std::optional<std::filesystem::path> static_dir;  // UI bundle, served over HTTP
  std::optional<std::filesystem::path> trace_dir;   // per-session CSV traces
  bool stop_on_signal = false;                      // SIGINT / SIGTERM end run()
};

/// WebSocket host for interactive sessions. Every accepted connection gets
/// its own Session and its own thread running a 100 Hz tick timer, a read
/// loop and a write queue on one io_context, so a session's
/// input-apply / step / emit order is total. State frames are dropped while
/// a previous write is still in flight; control frames are queued.
class SessionServer {
 public:
  SessionServer(ExperimentConfig cfg, ServerOptions options);
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  // Bound port (useful with port 0). Valid after construction.
  std::uint16_t port() const;

  // Accept loop; returns after stop().
  void run();
  void stop();

 private:
  void accept();

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace softnash
