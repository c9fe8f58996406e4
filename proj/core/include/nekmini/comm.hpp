#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace nekmini {

// Virtual cost of one message: the sender is busy for latency + bytes / bandwidth
// and the message becomes available to the receiver at the sender's new clock.
struct CostModel {
  double latency_us = 1.0;
  double bandwidth_bytes_per_us = 1000.0;
};

using Bytes = std::vector<std::byte>;

// In-process mailbox shared by a pool of simulated ranks. Messages between an
// ordered pair of ranks are delivered in send order.
class Transport {
 public:
  Transport(int size, CostModel cost);

  int size() const { return size_; }
  const CostModel& cost() const { return cost_; }

  void send(int src, int dst, int tag, Bytes payload, double arrival);
  // Blocks until a message from src is available; returns it with its arrival time.
  Bytes recv(int dst, int src, int tag, double& arrival);
  // Returns the maximum of the callers' clocks.
  double barrier(double clock);

  void abort();
  bool aborted() const { return aborted_.load(); }

  std::uint64_t messages_sent() const { return messages_.load(); }

 private:
  struct Message {
    int tag;
    Bytes data;
    double arrival;
  };
  struct Inbox {
    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::deque<Message>> from;  // indexed by source rank
  };

  int size_;
  CostModel cost_;
  std::vector<std::unique_ptr<Inbox>> inbox_;
  std::atomic<bool> aborted_{false};
  std::atomic<std::uint64_t> messages_{0};

  std::mutex barrier_mu_;
  std::condition_variable barrier_cv_;
  int barrier_count_ = 0;
  std::uint64_t barrier_gen_ = 0;
  double barrier_max_ = 0.0;
  double barrier_result_ = 0.0;
};

struct CommEvent {
  std::uint64_t seq;
  std::string name;
};

// One rank's view of the transport.
class Comm {
 public:
  Comm(Transport& t, int rank) : t_(&t), rank_(rank) {}

  int rank() const { return rank_; }
  int size() const { return t_->size(); }
  const CostModel& cost() const { return t_->cost(); }

  void send(int dst, int tag, Bytes payload);
  Bytes recv(int src, int tag);
  void barrier();

  template <class T>
  void send_vec(int dst, int tag, std::span<const T> v) {
    static_assert(std::is_trivially_copyable_v<T>);
    Bytes b(v.size_bytes());
    if (!b.empty()) std::memcpy(b.data(), v.data(), b.size());
    send(dst, tag, std::move(b));
  }
  template <class T>
  std::vector<T> recv_vec(int src, int tag) {
    static_assert(std::is_trivially_copyable_v<T>);
    Bytes b = recv(src, tag);
    std::vector<T> v(b.size() / sizeof(T));
    if (!b.empty()) std::memcpy(v.data(), b.data(), b.size());
    return v;
  }

  // Rank 0 receives every rank's block (indexed by rank); other ranks get {}.
  template <class T>
  std::vector<std::vector<T>> gather(std::span<const T> mine, int tag) {
    std::vector<std::vector<T>> out;
    if (rank_ != 0) {
      send_vec<T>(0, tag, mine);
      return out;
    }
    out.resize(size());
    out[0].assign(mine.begin(), mine.end());
    for (int r = 1; r < size(); ++r) out[r] = recv_vec<T>(r, tag);
    return out;
  }

  template <class T>
  std::vector<T> bcast(std::vector<T> v, int tag) {
    // binomial tree rooted at 0
    const int P = size();
    int mask = 1;
    while (mask < P) mask <<= 1;
    for (int m = mask >> 1; m >= 1; m >>= 1) {
      if (rank_ % (2 * m) == 0) {
        if (rank_ + m < P) send_vec<T>(rank_ + m, tag, v);
      } else if (rank_ % m == 0) {
        v = recv_vec<T>(rank_ - m, tag);
      }
    }
    return v;
  }

  double allreduce_max(double v);
  double allreduce_min(double v);
  std::int64_t allreduce_sum(std::int64_t v);

  // Column sums of a (keys.size() x width) row-major table, accumulated on rank 0
  // in ascending key order and broadcast, so the result does not depend on how
  // rows are distributed over ranks.
  std::vector<double> ordered_sum(std::span<const std::int64_t> keys, std::span<const double> rows,
                                  int width);

  double clock() const { return clock_; }
  void advance(double us) { clock_ += us; }

  void log_event(std::string name) { events_.push_back({seq_++, std::move(name)}); }
  const std::vector<CommEvent>& events() const { return events_; }
  void clear_events() { events_.clear(); }

  Transport& transport() { return *t_; }

 private:
  Transport* t_;
  int rank_;
  double clock_ = 0.0;
  std::uint64_t seq_ = 0;
  std::vector<CommEvent> events_;
};

// Runs body on `ranks` threads, each with its own Comm. If any rank throws, the
// transport is aborted so blocked ranks unwind, and the first original exception
// is rethrown after all threads join.
void run_ranks(int ranks, const CostModel& cost, const std::function<void(Comm&)>& body);

}  // namespace nekmini
