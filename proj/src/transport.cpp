#include "faircert/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <sstream>
#include <thread>

#include "faircert/crypto.hpp"

namespace faircert {

namespace {

struct SharedQueues {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Frame> queue[2];
  bool closed[2] = {false, false};
};

class QueueChannel final : public Channel {
 public:
  QueueChannel(std::shared_ptr<SharedQueues> shared, int side, std::chrono::milliseconds timeout)
      : shared_(std::move(shared)), side_(side), timeout_(timeout) {}

  ~QueueChannel() override {
    std::lock_guard lock(shared_->mu);
    shared_->closed[side_] = true;
    shared_->cv.notify_all();
  }

  void send(const Frame& frame) override {
    // round-trip through the codec so both transports enforce the same framing
    Frame copy = decode_frame(encode_frame(frame));
    std::lock_guard lock(shared_->mu);
    require(!shared_->closed[1 - side_], ErrorCode::protocol_error, "peer closed");
    shared_->queue[1 - side_].push_back(std::move(copy));
    shared_->cv.notify_all();
  }

  Frame recv() override {
    std::unique_lock lock(shared_->mu);
    auto& q = shared_->queue[side_];
    const bool ready = shared_->cv.wait_for(lock, timeout_, [&] { return !q.empty() || shared_->closed[1 - side_]; });
    require(ready, ErrorCode::protocol_error, "receive timed out");
    require(!q.empty(), ErrorCode::protocol_error, "peer closed");
    Frame f = std::move(q.front());
    q.pop_front();
    return f;
  }

 private:
  std::shared_ptr<SharedQueues> shared_;
  int side_;
  std::chrono::milliseconds timeout_;
};

[[noreturn]] void sys_fail(const std::string& what) {
  fail(ErrorCode::io_error, what + ": " + std::strerror(errno));
}

void set_timeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  require(::getaddrinfo(host.c_str(), nullptr, &hints, &found) == 0 && found, ErrorCode::io_error,
          "cannot resolve " + host);
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return addr;
}

void read_exact(int fd, std::uint8_t* out, std::size_t n) {
  while (n > 0) {
    const ssize_t got = ::recv(fd, out, n, 0);
    if (got == 0) fail(ErrorCode::protocol_error, "peer closed");
    if (got < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) fail(ErrorCode::protocol_error, "receive timed out");
      sys_fail("recv");
    }
    out += got;
    n -= static_cast<std::size_t>(got);
  }
}

}  // namespace

ChannelPair make_in_process_pair(std::chrono::milliseconds timeout) {
  auto shared = std::make_shared<SharedQueues>();
  return {std::make_unique<QueueChannel>(shared, 0, timeout), std::make_unique<QueueChannel>(shared, 1, timeout)};
}

TcpChannel::TcpChannel(int fd, std::chrono::milliseconds timeout) : fd_(fd) {
  set_timeout(fd_, timeout);
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpChannel> TcpChannel::connect(const std::string& host, std::uint16_t port,
                                                std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(host, port);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sys_fail("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0)
      return std::make_unique<TcpChannel>(fd, timeout);
    const int err = errno;
    ::close(fd);
    if ((err != ECONNREFUSED && err != EINTR) || std::chrono::steady_clock::now() >= deadline) {
      errno = err;
      sys_fail("connect " + host + ":" + std::to_string(port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void TcpChannel::send(const Frame& frame) {
  const Bytes bytes = encode_frame(frame);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t put = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (put < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) fail(ErrorCode::protocol_error, "peer closed");
      sys_fail("send");
    }
    off += static_cast<std::size_t>(put);
  }
}

Frame TcpChannel::recv() {
  std::uint8_t header[5];
  read_exact(fd_, header, 5);
  const std::uint32_t length = std::uint32_t{header[0]} | std::uint32_t{header[1]} << 8 |
                               std::uint32_t{header[2]} << 16 | std::uint32_t{header[3]} << 24;
  require(length >= 1 && length <= kMaxFrameLength, ErrorCode::protocol_error, "bad frame length");
  Frame f;
  f.type = checked_frame_type(header[4]);
  f.payload.resize(length - 1);
  if (!f.payload.empty()) read_exact(fd_, f.payload.data(), f.payload.size());
  return f;
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = resolve(host, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(fd_);
    errno = err;
    sys_fail("bind " + host + ":" + std::to_string(port));
  }
  if (::listen(fd_, 8) != 0) sys_fail("listen");
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpChannel> TcpListener::accept(std::chrono::milliseconds timeout) {
  pollfd p{fd_, POLLIN, 0};
  int ready;
  do {
    ready = ::poll(&p, 1, static_cast<int>(timeout.count()));
  } while (ready < 0 && errno == EINTR);
  if (ready < 0) sys_fail("poll");
  require(ready > 0, ErrorCode::protocol_error, "accept timed out");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) sys_fail("accept");
  return std::make_unique<TcpChannel>(fd, timeout);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  const std::string host = colon == std::string::npos ? "127.0.0.1" : text.substr(0, colon);
  const std::string port_text = colon == std::string::npos ? text : text.substr(colon + 1);
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(port_text, &used);
    require(used == port_text.size(), ErrorCode::invalid_argument, "");
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, "bad endpoint '" + text + "'");
  }
  require(port <= 65535, ErrorCode::invalid_argument, "port out of range in '" + text + "'");
  return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(port)};
}

void WireLog::add(WireEvent event) {
  std::lock_guard lock(mu_);
  events_.push_back(std::move(event));
}

std::vector<WireEvent> WireLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

void RecordingChannel::send(const Frame& frame) {
  log_->add({link_, true, encode_frame(frame)});
  inner_.send(frame);
}

Frame RecordingChannel::recv() {
  Frame f = inner_.recv();
  log_->add({link_, false, encode_frame(f)});
  return f;
}

std::string wire_log_text(const std::vector<WireEvent>& events) {
  std::ostringstream out;
  for (const WireEvent& e : events) {
    const Frame f = decode_frame(e.frame);
    out << e.link << ' ' << (e.outbound ? "send" : "recv") << ' ' << frame_type_name(f.type) << ' '
        << f.payload.size() << ' ' << to_hex(sha3_256(e.frame)) << '\n';
  }
  return out.str();
}

}  // namespace faircert
