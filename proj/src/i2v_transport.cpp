#include "crossguard/i2v_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <iostream>

namespace crossguard::i2v {

std::int64_t SystemClock::now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

Broadcaster::Broadcaster(std::string intersection_id, std::int64_t tick_ms, SpatProvider spat,
                         IcaProvider ica, DatagramSink sink)
    : intersection_id_(std::move(intersection_id)),
      tick_ms_(tick_ms),
      spat_(std::move(spat)),
      ica_(std::move(ica)),
      sink_(std::move(sink)) {
  if (tick_ms_ <= 0) throw CodecError("broadcaster tick must be positive");
}

void Broadcaster::tick(std::int64_t now_ms) {
  if (spat_) {
    std::optional<SpatMessage> m;
    try {
      m = spat_(now_ms);
    } catch (const std::exception& e) {
      std::cerr << "spat provider failed: " << e.what() << "\n";
    }
    if (m) {
      m->intersection_id = intersection_id_;
      m->seq = spat_seq_++;
      m->timestamp_ms = now_ms;
      sink_(encode(*m));
    }
  }
  if (ica_) {
    std::optional<IcaMessage> m;
    try {
      m = ica_(now_ms);
    } catch (const std::exception& e) {
      std::cerr << "ica provider failed: " << e.what() << "\n";
    }
    if (m) {
      m->intersection_id = intersection_id_;
      m->seq = ica_seq_++;
      m->timestamp_ms = now_ms;
      sink_(encode(*m));
    }
  }
}

void Broadcaster::run(Clock& clock, const std::atomic<bool>& stop) {
  std::int64_t next = clock.now_ms();
  while (!stop.load(std::memory_order_relaxed)) {
    std::int64_t now = clock.now_ms();
    if (now >= next) {
      tick(next);
      next += tick_ms_;
    } else {
      clock.sleep_ms(std::min<std::int64_t>(next - now, 5));
    }
  }
}

void Broadcaster::run_for(Clock& clock, std::int64_t duration_ms) {
  std::int64_t start = clock.now_ms();
  std::int64_t next = start;
  while (next < start + duration_ms) {
    std::int64_t now = clock.now_ms();
    if (now >= next) {
      tick(next);
      next += tick_ms_;
    } else {
      clock.sleep_ms(next - now);
    }
  }
}

Bus::Handle Bus::subscribe() {
  std::lock_guard lk(mu_);
  queues_.emplace_back();
  return queues_.size() - 1;
}

void Bus::set_now(std::int64_t now_ms) {
  std::lock_guard lk(mu_);
  now_ms_ = now_ms;
}

void Bus::publish(const Message& message, std::int64_t now_ms, std::int64_t staleness_ms) {
  std::lock_guard lk(mu_);
  now_ms_ = now_ms;
  Received r{message, now_ms, now_ms - timestamp_of(message) > staleness_ms};
  for (auto& q : queues_) q.push_back(r);
}

std::vector<Received> Bus::drain(Handle h) {
  std::lock_guard lk(mu_);
  std::vector<Received> out(queues_.at(h).begin(), queues_.at(h).end());
  queues_.at(h).clear();
  return out;
}

DatagramSink Bus::sink(std::int64_t staleness_ms) {
  return [this, staleness_ms](const std::string& bytes) {
    Message m = decode(bytes);
    std::int64_t ts = timestamp_of(m);
    std::lock_guard lk(mu_);
    Received r{std::move(m), now_ms_, now_ms_ - ts > staleness_ms};
    for (auto& q : queues_) q.push_back(r);
  };
}

UdpSender::UdpSender(int port) : port_(port) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw CodecError("cannot open udp socket");
}

UdpSender::~UdpSender() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpSender::operator()(const std::string& datagram) const {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port_));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::sendto(fd_, datagram.data(), datagram.size(), 0, reinterpret_cast<sockaddr*>(&addr),
           sizeof addr);
}

DatagramSink UdpSender::sink() const {
  return [this](const std::string& d) { (*this)(d); };
}

UdpSubscriber::UdpSubscriber(int port, std::int64_t staleness_ms)
    : staleness_ms_(staleness_ms) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw CodecError("cannot open udp socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  timeval tv{0, 50 * 1000};  // wake regularly to honor stop()
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
    throw CodecError("cannot bind udp port " + std::to_string(port));
}

UdpSubscriber::~UdpSubscriber() {
  stop();
  if (fd_ >= 0) ::close(fd_);
}

void UdpSubscriber::start(Clock& clock) {
  running_ = true;
  thread_ = std::thread(&UdpSubscriber::loop, this, &clock);
}

void UdpSubscriber::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

void UdpSubscriber::loop(Clock* clock) {
  std::vector<char> buf(64 * 1024);
  while (running_) {
    ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n <= 0) continue;
    std::string bytes(buf.data(), static_cast<std::size_t>(n));
    Message m;
    try {
      m = decode(bytes);
    } catch (const CodecError&) {
      ++corrupt_;
      continue;
    }
    std::int64_t now = clock->now_ms();
    Received r{m, now, now - timestamp_of(m) > staleness_ms_};
    std::string key = intersection_of(m) + "/" + type_of(m);
    {
      std::lock_guard lk(mu_);
      auto it = last_seq_.find(key);
      std::uint64_t seq = seq_of(m);
      if (it != last_seq_.end() && seq > it->second + 1) gaps_ += seq - it->second - 1;
      last_seq_[key] = seq;
      queue_.push_back(std::move(r));
    }
  }
}

std::vector<Received> UdpSubscriber::drain() {
  std::lock_guard lk(mu_);
  std::vector<Received> out(queue_.begin(), queue_.end());
  queue_.clear();
  return out;
}

}  // namespace crossguard::i2v
