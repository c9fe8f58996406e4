#include "nekmini/comm.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "nekmini/error.hpp"

namespace nekmini {

Transport::Transport(int size, CostModel cost) : size_(size), cost_(cost) {
  if (size < 1) throw SetupError("rank count must be >= 1");
  inbox_.reserve(size);
  for (int r = 0; r < size; ++r) {
    inbox_.push_back(std::make_unique<Inbox>());
    inbox_.back()->from.resize(size);
  }
}

void Transport::send(int src, int dst, int tag, Bytes payload, double arrival) {
  if (dst < 0 || dst >= size_) throw RoutingError("destination rank " + std::to_string(dst) + " out of range");
  Inbox& box = *inbox_[dst];
  {
    std::lock_guard lock(box.mu);
    box.from[src].push_back({tag, std::move(payload), arrival});
  }
  ++messages_;
  box.cv.notify_all();
}

Bytes Transport::recv(int dst, int src, int tag, double& arrival) {
  if (src < 0 || src >= size_) throw RoutingError("source rank " + std::to_string(src) + " out of range");
  Inbox& box = *inbox_[dst];
  std::unique_lock lock(box.mu);
  box.cv.wait(lock, [&] { return aborted_.load() || !box.from[src].empty(); });
  if (box.from[src].empty()) throw AbortedError("transport aborted while rank " + std::to_string(dst) + " waited");
  Message m = std::move(box.from[src].front());
  box.from[src].pop_front();
  if (m.tag != tag)
    throw RoutingError("rank " + std::to_string(dst) + " expected tag " + std::to_string(tag) +
                       " from rank " + std::to_string(src) + ", got " + std::to_string(m.tag));
  arrival = m.arrival;
  return std::move(m.data);
}

double Transport::barrier(double clock) {
  std::unique_lock lock(barrier_mu_);
  if (aborted_) throw AbortedError("transport aborted in barrier");
  const std::uint64_t gen = barrier_gen_;
  barrier_max_ = barrier_count_ == 0 ? clock : std::max(barrier_max_, clock);
  if (++barrier_count_ == size_) {
    barrier_result_ = barrier_max_;
    barrier_count_ = 0;
    ++barrier_gen_;
    barrier_cv_.notify_all();
    return barrier_result_;
  }
  barrier_cv_.wait(lock, [&] { return barrier_gen_ != gen || aborted_.load(); });
  if (barrier_gen_ == gen) throw AbortedError("transport aborted in barrier");
  return barrier_result_;
}

void Transport::abort() {
  aborted_ = true;
  for (auto& b : inbox_) {
    std::lock_guard lock(b->mu);
    b->cv.notify_all();
  }
  std::lock_guard lock(barrier_mu_);
  barrier_cv_.notify_all();
}

void Comm::send(int dst, int tag, Bytes payload) {
  clock_ += cost().latency_us + static_cast<double>(payload.size()) / cost().bandwidth_bytes_per_us;
  t_->send(rank_, dst, tag, std::move(payload), clock_);
}

Bytes Comm::recv(int src, int tag) {
  double arrival = 0.0;
  Bytes b = t_->recv(rank_, src, tag, arrival);
  clock_ = std::max(clock_, arrival);
  return b;
}

void Comm::barrier() { clock_ = t_->barrier(clock_); }

namespace {
constexpr int kTagReduce = 900001;
constexpr int kTagOrdered = 900002;
}  // namespace

double Comm::allreduce_max(double v) {
  auto all = gather<double>(std::span<const double>(&v, 1), kTagReduce);
  std::vector<double> r{v};
  if (rank_ == 0)
    for (auto& b : all) r[0] = std::max(r[0], b[0]);
  return bcast(r, kTagReduce)[0];
}

double Comm::allreduce_min(double v) { return -allreduce_max(-v); }

std::int64_t Comm::allreduce_sum(std::int64_t v) {
  auto all = gather<std::int64_t>(std::span<const std::int64_t>(&v, 1), kTagReduce);
  std::vector<std::int64_t> r{0};
  if (rank_ == 0)
    for (auto& b : all) r[0] += b[0];
  return bcast(r, kTagReduce)[0];
}

std::vector<double> Comm::ordered_sum(std::span<const std::int64_t> keys, std::span<const double> rows,
                                      int width) {
  if (rows.size() != keys.size() * static_cast<size_t>(width))
    throw ContractError("ordered_sum: table shape mismatch");
  std::vector<double> result(width, 0.0);
  if (size() == 1) {
    std::vector<size_t> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return keys[a] < keys[b]; });
    for (size_t i : order)
      for (int c = 0; c < width; ++c) result[c] += rows[i * width + c];
    return result;
  }
  // Pack keys and rows together as doubles-sized words.
  std::vector<double> packed(keys.size() * (width + 1));
  for (size_t i = 0; i < keys.size(); ++i) {
    std::memcpy(&packed[i * (width + 1)], &keys[i], sizeof(double));
    for (int c = 0; c < width; ++c) packed[i * (width + 1) + 1 + c] = rows[i * width + c];
  }
  auto all = gather<double>(packed, kTagOrdered);
  if (rank_ == 0) {
    struct Row {
      std::int64_t key;
      const double* v;
    };
    std::vector<Row> table;
    for (auto& blk : all)
      for (size_t i = 0; i < blk.size(); i += width + 1) {
        std::int64_t k;
        std::memcpy(&k, &blk[i], sizeof(k));
        table.push_back({k, &blk[i + 1]});
      }
    std::stable_sort(table.begin(), table.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
    for (const Row& r : table)
      for (int c = 0; c < width; ++c) result[c] += r.v[c];
  }
  return bcast(result, kTagOrdered);
}

void run_ranks(int ranks, const CostModel& cost, const std::function<void(Comm&)>& body) {
  Transport transport(ranks, cost);
  if (ranks == 1) {
    Comm c(transport, 0);
    body(c);
    return;
  }
  std::vector<std::exception_ptr> errors(ranks);
  std::vector<std::thread> threads;
  threads.reserve(ranks);
  for (int r = 0; r < ranks; ++r)
    threads.emplace_back([&, r] {
      Comm c(transport, r);
      try {
        body(c);
      } catch (...) {
        errors[r] = std::current_exception();
        transport.abort();
      }
    });
  for (auto& t : threads) t.join();
  // Prefer the root cause over the AbortedError seen by bystanders.
  std::exception_ptr first_aborted;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const AbortedError&) {
      if (!first_aborted) first_aborted = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first_aborted) std::rethrow_exception(first_aborted);
}

}  // namespace nekmini
