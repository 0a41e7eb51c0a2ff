#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "faircert/wire.hpp"

namespace faircert {

inline constexpr std::chrono::milliseconds kDefaultRecvTimeout{30'000};

/// Reliable ordered frame channel. recv blocks up to the channel's timeout and
/// raises PROTOCOL_ERROR on timeout or when the peer has gone away.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Frame& frame) = 0;
  virtual Frame recv() = 0;
};

using ChannelPair = std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>;

/// Two connected in-process endpoints (queue + condition variable).
ChannelPair make_in_process_pair(std::chrono::milliseconds timeout = kDefaultRecvTimeout);

class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd, std::chrono::milliseconds timeout = kDefaultRecvTimeout);
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  /// Retries refused connections until `timeout` elapses.
  static std::unique_ptr<TcpChannel> connect(const std::string& host, std::uint16_t port,
                                             std::chrono::milliseconds timeout = kDefaultRecvTimeout);

  void send(const Frame& frame) override;
  Frame recv() override;

 private:
  int fd_;
};

class TcpListener {
 public:
  /// Port 0 picks an ephemeral port.
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  std::unique_ptr<TcpChannel> accept(std::chrono::milliseconds timeout = kDefaultRecvTimeout);

 private:
  int fd_;
  std::uint16_t port_ = 0;
};

/// "host:port"; a bare port means 127.0.0.1.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

struct WireEvent {
  std::string link;
  bool outbound = false;
  Bytes frame;  // full encoded frame
  friend bool operator==(const WireEvent&, const WireEvent&) = default;
};

/// Ordered log of every frame one party sent or received, across all its links.
class WireLog {
 public:
  void add(WireEvent event);
  std::vector<WireEvent> events() const;

 private:
  mutable std::mutex mu_;
  std::vector<WireEvent> events_;
};

class RecordingChannel final : public Channel {
 public:
  RecordingChannel(Channel& inner, std::shared_ptr<WireLog> log, std::string link)
      : inner_(inner), log_(std::move(log)), link_(std::move(link)) {}

  void send(const Frame& frame) override;
  Frame recv() override;

 private:
  Channel& inner_;
  std::shared_ptr<WireLog> log_;
  std::string link_;
};

/// One line per event: "<link> <send|recv> <TYPE> <payload length> <sha3 of frame>".
std::string wire_log_text(const std::vector<WireEvent>& events);

}  // namespace faircert
