#include "softnash/server.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "softnash/session.hpp"

namespace softnash {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

// Runs one session on the calling thread until the peer leaves or sends end.
class Connection {
 public:
  Connection(asio::io_context& ioc, tcp::socket socket,
             const ExperimentConfig& cfg, const ServerOptions& options,
             std::uint64_t id)
      : ws_(std::move(socket)), timer_(ioc), cfg_(cfg),
        options_(options), id_(id) {}

  void start(http::request<http::string_body> upgrade) {
    ws_.text(true);
    ws_.accept(upgrade);
    session_.emplace(cfg_);
    send(session_->handshake(), /*droppable=*/false);
    read();
    next_tick_ = std::chrono::steady_clock::now();
    schedule_tick();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [this](beast::error_code ec, std::size_t) {
      if (ec) {
        shutdown();
        return;
      }
      inbox_.push_back(beast::buffers_to_string(buffer_.data()));
      buffer_.consume(buffer_.size());
      read();
    });
  }

  void schedule_tick() {
    next_tick_ += std::chrono::microseconds(
        static_cast<long>(std::llround(session_->period_s() * 1e6)));
    timer_.expires_at(next_tick_);
    timer_.async_wait([this](beast::error_code ec) {
      if (ec || closing_) return;
      on_tick();
    });
  }

  void on_tick() {
    // input-apply, step, emit
    while (!inbox_.empty()) {
      auto reply = session_->handle(inbox_.front());
      inbox_.pop_front();
      if (session_->ended()) persist_trace();  // before the final frame leaves
      if (reply) send(std::move(*reply), false);
      if (session_->ended()) {
        finish();
        return;
      }
    }
    if (auto frame = session_->tick()) send(std::move(*frame), true);
    schedule_tick();
  }

  void persist_trace() {
    if (!options_.trace_dir) return;
    try {
      std::filesystem::create_directories(*options_.trace_dir);
      session_->write_trace(*options_.trace_dir /
                            ("session_" + std::to_string(id_) + ".csv"));
    } catch (const std::exception& e) {
      std::cerr << "session " << id_ << ": " << e.what() << '\n';
    }
  }

  void finish() {
    close_after_flush_ = true;
    if (!writing_) close();
  }

  void send(std::string frame, bool droppable) {
    if (closing_) return;
    if (writing_) {
      if (droppable) return;  // backpressure: never stall the tick loop
      outbox_.push_back(std::move(frame));
      return;
    }
    write(std::move(frame));
  }

  void write(std::string frame) {
    writing_ = true;
    current_ = std::move(frame);
    ws_.async_write(asio::buffer(current_),
                    [this](beast::error_code ec, std::size_t) {
                      writing_ = false;
                      if (ec) {
                        shutdown();
                        return;
                      }
                      if (!outbox_.empty()) {
                        auto next = std::move(outbox_.front());
                        outbox_.pop_front();
                        write(std::move(next));
                      } else if (close_after_flush_) {
                        close();
                      }
                    });
  }

  void close() {
    if (closing_) return;
    closing_ = true;
    timer_.cancel();
    ws_.async_close(websocket::close_code::normal,
                    [this](beast::error_code) { shutdown(); });
  }

  void shutdown() {
    closing_ = true;
    timer_.cancel();
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).close(ignored);
  }

  websocket::stream<tcp::socket> ws_;
  asio::steady_timer timer_;
  const ExperimentConfig& cfg_;
  const ServerOptions& options_;
  std::uint64_t id_;
  std::optional<session::Session> session_;
  beast::flat_buffer buffer_;
  std::deque<std::string> inbox_;
  std::deque<std::string> outbox_;
  std::string current_;
  std::chrono::steady_clock::time_point next_tick_;
  bool writing_ = false;
  bool closing_ = false;
  bool close_after_flush_ = false;
};

void serve_http(tcp::socket& socket, const http::request<http::string_body>& req,
                const ServerOptions& options) {
  http::response<http::string_body> res;
  res.version(req.version());
  res.keep_alive(false);
  std::string target(req.target());
  if (target.empty() || target == "/") target = "/index.html";
  std::optional<std::string> body;
  if (options.static_dir && target.find("..") == std::string::npos) {
    const auto path = *options.static_dir / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      body = buf.str();
      res.set(http::field::content_type, mime_type(path));
    }
  }
  if (body) {
    res.result(http::status::ok);
    res.body() = std::move(*body);
  } else {
    res.result(http::status::not_found);
    res.set(http::field::content_type, "text/plain");
    res.body() = "not found\n";
  }
  res.prepare_payload();
  beast::error_code ec;
  http::write(socket, res, ec);
  socket.shutdown(tcp::socket::shutdown_send, ec);
}

void handle_connection(tcp::socket socket, const ExperimentConfig& cfg,
                       const ServerOptions& options, std::uint64_t id) {
  try {
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(socket, buffer, req);
    if (!websocket::is_upgrade(req)) {
      serve_http(socket, req, options);
      return;
    }
    asio::io_context ioc;
    // Rebind the accepted socket to this thread's context.
    const auto protocol = socket.local_endpoint().protocol();
    tcp::socket local(ioc);
    local.assign(protocol, socket.release());
    Connection conn(ioc, std::move(local), cfg, options, id);
    conn.start(std::move(req));
    ioc.run();
  } catch (const std::exception& e) {
    std::cerr << "session " << id << ": " << e.what() << '\n';
  }
}

}  // namespace

struct SessionServer::Impl {
  ExperimentConfig cfg;
  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::optional<asio::signal_set> signals;
  std::atomic<bool> stopping{false};
  std::mutex workers_mutex;
  std::vector<std::jthread> workers;
  std::uint64_t next_id = 1;
};

SessionServer::SessionServer(ExperimentConfig cfg, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
  impl_->options = std::move(options);
  // Fail fast on a config the sessions could not use.
  session::Session probe(impl_->cfg);
  const tcp::endpoint endpoint(asio::ip::make_address(impl_->options.address),
                               impl_->options.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
}

SessionServer::~SessionServer() {
  stop();
  std::lock_guard lock(impl_->workers_mutex);
  impl_->workers.clear();  // joins
}

std::uint16_t SessionServer::port() const {
  return impl_->acceptor.local_endpoint().port();
}

void SessionServer::run() {
  if (impl_->options.stop_on_signal) {
    impl_->signals.emplace(impl_->ioc, SIGINT, SIGTERM);
    impl_->signals->async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  accept();
  impl_->ioc.run();
}

void SessionServer::accept() {
  impl_->acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (impl_->stopping || !impl_->acceptor.is_open()) return;
    if (!ec) {
      std::lock_guard lock(impl_->workers_mutex);
      impl_->workers.emplace_back(
          [s = std::move(socket), this, id = impl_->next_id++]() mutable {
            handle_connection(std::move(s), impl_->cfg, impl_->options, id);
          });
    }
    accept();
  });
}

void SessionServer::stop() {
  if (impl_->stopping.exchange(true)) return;
  asio::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    if (impl_->signals) impl_->signals->cancel(ec);
  });
}

}  // namespace softnash
