#include "squidsim/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/evp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <system_error>

namespace squidsim {

namespace {

constexpr std::string_view kWsGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::string> header_value(std::string_view request, std::string_view name)
{
  const std::string lreq = lower(request);
  const std::string key = "\r\n" + lower(name) + ":";
  const auto pos = lreq.find(key);
  if (pos == std::string::npos) return std::nullopt;
  const auto start = pos + key.size();
  const auto end = request.find("\r\n", start);
  return std::string(trim(request.substr(start, end - start)));
}

// Decodes complete client frames from `buf`, appending text payloads to
// `text`. Returns false on a close frame or protocol error.
bool websocket_decode(std::string& buf, std::string& text, std::string& pongs)
{
  for (;;) {
    if (buf.size() < 2) return true;
    const auto b0 = static_cast<unsigned char>(buf[0]);
    const auto b1 = static_cast<unsigned char>(buf[1]);
    const int opcode = b0 & 0x0f;
    const bool masked = (b1 & 0x80) != 0;
    std::uint64_t len = b1 & 0x7f;
    std::size_t off = 2;
    if (len == 126) {
      if (buf.size() < 4) return true;
      len = (static_cast<std::uint64_t>(static_cast<unsigned char>(buf[2])) << 8) |
            static_cast<unsigned char>(buf[3]);
      off = 4;
    } else if (len == 127) {
      if (buf.size() < 10) return true;
      len = 0;
      for (int i = 0; i < 8; ++i) len = (len << 8) | static_cast<unsigned char>(buf[2 + i]);
      off = 10;
    }
    if (len > (1u << 20)) return false;
    const std::size_t mask_off = off;
    if (masked) off += 4;
    if (buf.size() < off + len) return true;
    std::string payload = buf.substr(off, len);
    if (masked)
      for (std::size_t i = 0; i < payload.size(); ++i) payload[i] ^= buf[mask_off + i % 4];
    buf.erase(0, off + len);
    if (opcode == 0x8) return false;
    if (opcode == 0x9) {
      std::string pong;
      pong.push_back(static_cast<char>(0x8a));
      pong.push_back(static_cast<char>(payload.size()));
      pongs += pong + payload.substr(0, 125);
      continue;
    }
    if (opcode == 0x1 || opcode == 0x0) {
      text += payload;
      text += '\n';
    }
  }
}

bool send_all(int fd, std::string_view data)
{
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

std::string websocket_accept_key(std::string_view client_key)
{
  const std::string input = std::string(client_key) + std::string(kWsGuid);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha1(), nullptr);
  unsigned char out[64];
  const int n = EVP_EncodeBlock(out, digest, static_cast<int>(len));
  return std::string(reinterpret_cast<char*>(out), static_cast<std::size_t>(n));
}

std::string websocket_text_frame(std::string_view payload)
{
  std::string f;
  f.push_back(static_cast<char>(0x81));
  const std::size_t n = payload.size();
  if (n < 126) {
    f.push_back(static_cast<char>(n));
  } else if (n <= 0xffff) {
    f.push_back(static_cast<char>(126));
    f.push_back(static_cast<char>((n >> 8) & 0xff));
    f.push_back(static_cast<char>(n & 0xff));
  } else {
    f.push_back(static_cast<char>(127));
    for (int i = 7; i >= 0; --i) f.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  }
  f += payload;
  return f;
}

struct Bridge::Client {
  std::uint64_t id = 0;
  int fd = -1;
  bool websocket = false;
  std::atomic<bool> ready{false};
  std::mutex write_mutex;
};

Bridge::Bridge(BridgeConfig config) : config_(std::move(config))
{
  config_.sim.validate();
  if (!(config_.speed > 0.0)) throw std::invalid_argument("bridge speed must be > 0");
  for (const auto& ev : config_.events) (void)parse_command(ev.command);
}

Bridge::~Bridge() { stop(); }

void Bridge::start()
{
  if (running_) return;
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::system_error(errno, std::generic_category(), "socket");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::invalid_argument("bad bind address '" + config_.bind_address + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    const int err = errno;
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::system_error(err, std::generic_category(),
                            "cannot listen on port " + std::to_string(config_.port));
  }
  socklen_t alen = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &alen);
  port_ = ntohs(addr.sin_port);

  running_ = true;
  sim_thread_ = std::thread([this] { sim_loop(); });
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Bridge::stop()
{
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  if (sim_thread_.joinable()) sim_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lk(clients_mutex_);
    for (auto& c : clients_) {
      std::lock_guard wl(c->write_mutex);
      if (c->fd >= 0) ::shutdown(c->fd, SHUT_RDWR);
    }
    threads.swap(client_threads_);
  }
  for (auto& t : threads) t.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
}

LogRow Bridge::last_row() const
{
  std::lock_guard lk(row_mutex_);
  return last_row_;
}

void Bridge::accept_loop()
{
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    auto client = std::make_shared<Client>();
    client->fd = fd;
    std::lock_guard lk(clients_mutex_);
    client->id = next_client_id_++;
    clients_.push_back(client);
    client_threads_.emplace_back([this, client] { client_loop(client); });
  }
}

void Bridge::client_loop(std::shared_ptr<Client> client)
{
  std::string buf;
  char chunk[4096];
  const auto receive = [&](int timeout_ms) -> int {
    pollfd p{client->fd, POLLIN, 0};
    const int pr = ::poll(&p, 1, timeout_ms);
    if (pr <= 0) return pr;
    const ssize_t n = ::recv(client->fd, chunk, sizeof(chunk), 0);
    if (n <= 0) return -1;
    buf.append(chunk, static_cast<std::size_t>(n));
    return 1;
  };

  bool open = true;
  // A browser opens with an HTTP upgrade straight away; a silent client is
  // treated as a plain TCP observer.
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(300);
  while (open && running_ && buf.size() < 4 && buf.find('\n') == std::string::npos &&
         std::chrono::steady_clock::now() < deadline) {
    if (receive(20) < 0) open = false;
  }
  if (open && buf.starts_with("GET ")) {
    while (open && running_ && buf.find("\r\n\r\n") == std::string::npos) {
      if (receive(100) < 0 || buf.size() > 16384) open = false;
    }
    const auto end = buf.find("\r\n\r\n");
    const auto key = open ? header_value(std::string_view(buf).substr(0, end + 2),
                                         "Sec-WebSocket-Key")
                          : std::nullopt;
    if (key) {
      const std::string resp =
          "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
          "Sec-WebSocket-Accept: " +
          websocket_accept_key(*key) + "\r\n\r\n";
      std::lock_guard wl(client->write_mutex);
      client->websocket = true;
      open = send_all(client->fd, resp);
      buf.erase(0, end + 4);
    } else {
      std::lock_guard wl(client->write_mutex);
      send_all(client->fd, "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\n\r\n");
      open = false;
    }
  }
  client->ready = open;

  std::string text;
  while (open && running_) {
    if (client->websocket) {
      std::string pongs;
      if (!websocket_decode(buf, text, pongs)) break;
      if (!pongs.empty()) {
        std::lock_guard wl(client->write_mutex);
        send_all(client->fd, pongs);
      }
    } else {
      text += buf;
      buf.clear();
    }
    std::size_t nl;
    while ((nl = text.find('\n')) != std::string::npos) {
      std::string line = text.substr(0, nl);
      text.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      handle_line(client, line);
    }
    if (text.size() > 4096) {
      send_to(client, make_err_frame("parse frame too long"));
      text.clear();
    }
    if (receive(100) < 0) break;
  }

  {
    std::lock_guard lk(clients_mutex_);
    if (commander_ == client->id) commander_ = 0;
    clients_.erase(std::remove(clients_.begin(), clients_.end(), client), clients_.end());
  }
  std::lock_guard wl(client->write_mutex);
  client->ready = false;
  ::close(client->fd);
  client->fd = -1;
}

void Bridge::handle_line(const std::shared_ptr<Client>& client, std::string_view line)
{
  line = trim(line);
  if (line.empty()) return;
  Command cmd;
  try {
    cmd = parse_command(line);
  } catch (const ParseError& e) {
    send_to(client, make_err_frame(std::string("parse ") + e.what()));
    return;
  }
  if (const auto* m = std::get_if<MissionCommand>(&cmd);
      m && m->action == MissionCommand::Action::start && !config_.mission) {
    send_to(client, make_err_frame("mission no plan loaded"));
    return;
  }
  {
    std::lock_guard lk(clients_mutex_);
    if (commander_ == 0) commander_ = client->id;
    if (commander_ != client->id) {
      send_to(client, make_err_frame("observer command lock held by another client"));
      return;
    }
  }
  std::lock_guard lk(queue_mutex_);
  inbox_.push_back(std::move(cmd));
}

void Bridge::send_to(const std::shared_ptr<Client>& client, std::string_view frame)
{
  std::lock_guard wl(client->write_mutex);
  if (client->fd < 0) return;
  const std::string data =
      client->websocket ? websocket_text_frame(frame) : std::string(frame) + "\n";
  if (!send_all(client->fd, data)) ::shutdown(client->fd, SHUT_RDWR);
}

void Bridge::broadcast(std::string_view frame)
{
  std::vector<std::shared_ptr<Client>> targets;
  {
    std::lock_guard lk(clients_mutex_);
    for (const auto& c : clients_)
      if (c->ready) targets.push_back(c);
  }
  for (const auto& c : targets) send_to(c, frame);
  frames_sent_.fetch_add(1);
}

void Bridge::sim_loop()
{
  using clock = std::chrono::steady_clock;
  Simulator sim(config_.sim, config_.seed, config_.initial, config_.initial_fill_offset);
  if (config_.mission) sim.set_mission_plan(*config_.mission);

  std::vector<std::pair<double, Command>> events;
  for (const auto& ev : config_.events) events.emplace_back(ev.t, parse_command(ev.command));
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t next = 0;

  const auto wall0 = clock::now();
  while (running_) {
    while (next < events.size() && events[next].first <= sim.time() + 1e-9)
      sim.enqueue(events[next++].second);
    {
      std::lock_guard lk(queue_mutex_);
      for (auto& c : inbox_) sim.enqueue(c);
      inbox_.clear();
    }
    LogRow row;
    try {
      row = sim.tick();
    } catch (const DynamicsError& e) {
      broadcast(make_err_frame(std::string("simulation halted: ") + e.what()));
      return;
    }
    const bool emit = row.tlm_emitted && row.link.delivered;
    std::string frame;
    if (emit) frame = make_tlm_frame(row.payload, row.link.rssi_dbm);
    {
      std::lock_guard lk(row_mutex_);
      last_row_ = std::move(row);
    }
    ticks_.fetch_add(1);
    if (emit) broadcast(frame);

    const auto due = wall0 + std::chrono::duration_cast<clock::duration>(
                                 std::chrono::duration<double>(sim.time() / config_.speed));
    while (running_ && clock::now() < due)
      std::this_thread::sleep_until(std::min(due, clock::now() + std::chrono::milliseconds(50)));
  }
}

}  // namespace squidsim
