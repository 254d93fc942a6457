#ifndef CROSSGUARD_I2V_TRANSPORT_HPP
#define CROSSGUARD_I2V_TRANSPORT_HPP

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "crossguard/i2v.hpp"

namespace crossguard::i2v {

class Clock {
public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock : public Clock {
public:
  std::int64_t now_ms() override;
  void sleep_ms(std::int64_t ms) override;
};

/// Manual clock: sleeping advances time. Deterministic tests drive it.
class SimClock : public Clock {
public:
  explicit SimClock(std::int64_t start_ms = 0) : t_(start_ms) {}
  std::int64_t now_ms() override { return t_; }
  void sleep_ms(std::int64_t ms) override { t_ += ms; }
  void advance(std::int64_t ms) { t_ += ms; }

private:
  std::int64_t t_;
};

using DatagramSink = std::function<void(const std::string&)>;

/// Emits one SPaT and one ICA message per tick with monotone sequence
/// numbers. A provider failure (nullopt or exception) skips that message for
/// the tick and the broadcaster carries on.
class Broadcaster {
public:
  using SpatProvider = std::function<std::optional<SpatMessage>(std::int64_t now_ms)>;
  using IcaProvider = std::function<std::optional<IcaMessage>(std::int64_t now_ms)>;

  Broadcaster(std::string intersection_id, std::int64_t tick_ms, SpatProvider spat,
              IcaProvider ica, DatagramSink sink);

  void run(Clock& clock, const std::atomic<bool>& stop);
  /// Run ticks covering [now, now + duration_ms).
  void run_for(Clock& clock, std::int64_t duration_ms);
  /// One tick at the given instant.
  void tick(std::int64_t now_ms);

  std::uint64_t spat_sent() const { return spat_seq_; }
  std::uint64_t ica_sent() const { return ica_seq_; }

private:
  std::string intersection_id_;
  std::int64_t tick_ms_;
  SpatProvider spat_;
  IcaProvider ica_;
  DatagramSink sink_;
  std::uint64_t spat_seq_ = 0;
  std::uint64_t ica_seq_ = 0;
};

struct Received {
  Message message;
  std::int64_t received_ms = 0;
  bool stale = false;
};

/// In-process broadcast bus: every subscriber sees every published message.
class Bus {
public:
  using Handle = std::size_t;
  Handle subscribe();
  void publish(const Message& message, std::int64_t now_ms, std::int64_t staleness_ms = 300);
  std::vector<Received> drain(Handle h);
  DatagramSink sink(std::int64_t staleness_ms = 300);
  void set_now(std::int64_t now_ms);

private:
  std::mutex mu_;
  std::int64_t now_ms_ = 0;
  std::vector<std::deque<Received>> queues_;
};

/// Loopback UDP datagram sender.
class UdpSender {
public:
  explicit UdpSender(int port);
  ~UdpSender();
  UdpSender(const UdpSender&) = delete;
  UdpSender& operator=(const UdpSender&) = delete;
  void operator()(const std::string& datagram) const;
  DatagramSink sink() const;

private:
  int fd_ = -1;
  int port_;
};

/// Receives datagrams on a loopback port, decodes them, tracks corrupt
/// datagrams, sequence gaps and staleness (timestamp lag over the threshold).
class UdpSubscriber {
public:
  UdpSubscriber(int port, std::int64_t staleness_ms = 300);
  ~UdpSubscriber();
  UdpSubscriber(const UdpSubscriber&) = delete;
  UdpSubscriber& operator=(const UdpSubscriber&) = delete;

  void start(Clock& clock);
  void stop();
  std::vector<Received> drain();

  std::uint64_t corrupt_count() const { return corrupt_; }
  std::uint64_t gap_count() const { return gaps_; }

private:
  void loop(Clock* clock);

  int fd_ = -1;
  std::int64_t staleness_ms_;
  std::thread thread_;
  std::atomic<bool> running_{false};
  std::mutex mu_;
  std::deque<Received> queue_;
  std::atomic<std::uint64_t> corrupt_{0};
  std::atomic<std::uint64_t> gaps_{0};
  std::map<std::string, std::uint64_t> last_seq_;
};

constexpr int kDefaultPort = 47831;

}  // namespace crossguard::i2v

#endif
