#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "squidsim/simulator.hpp"

namespace squidsim {

struct BridgeConfig {
  SimConfig sim;
  std::uint64_t seed = 1;
  VehicleState initial;
  double initial_fill_offset = 0.0;
  std::optional<MissionPlan> mission;
  std::vector<ScenarioEvent> events;  // injected at their sim times
  double speed = 1.0;                 // sim seconds per wall second
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = 0;             // 0 picks a free port
};

/// Sec-WebSocket-Accept value for a client key.
std::string websocket_accept_key(std::string_view client_key);

/// Encodes one unmasked server-to-client text frame.
std::string websocket_text_frame(std::string_view payload);

// Serves the live simulation. Clients speak newline-terminated frames over
// TCP, or the same frames as WebSocket text messages if the connection
// opens with an HTTP upgrade request. The first client to send a valid
// command holds the command lock until it disconnects; others observe.
class Bridge {
 public:
  explicit Bridge(BridgeConfig config);
  ~Bridge();

  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  /// Binds and starts the simulation and accept threads. Throws
  /// std::system_error if the port cannot be bound.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }

  /// Most recent control-tick sample.
  LogRow last_row() const;
  std::uint64_t ticks() const { return ticks_.load(); }
  std::uint64_t frames_sent() const { return frames_sent_.load(); }

 private:
  struct Client;

  void accept_loop();
  void client_loop(std::shared_ptr<Client> client);
  void sim_loop();
  void handle_line(const std::shared_ptr<Client>& client, std::string_view line);
  void send_to(const std::shared_ptr<Client>& client, std::string_view frame);
  void broadcast(std::string_view frame);

  BridgeConfig config_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};

  std::thread sim_thread_;
  std::thread accept_thread_;

  mutable std::mutex clients_mutex_;
  std::vector<std::shared_ptr<Client>> clients_;
  std::vector<std::thread> client_threads_;
  std::uint64_t next_client_id_ = 1;
  std::uint64_t commander_ = 0;  // client id holding the command lock, 0 if none

  std::mutex queue_mutex_;
  std::vector<Command> inbox_;

  mutable std::mutex row_mutex_;
  LogRow last_row_;
  std::atomic<std::uint64_t> ticks_{0};
  std::atomic<std::uint64_t> frames_sent_{0};
};

}  // namespace squidsim
