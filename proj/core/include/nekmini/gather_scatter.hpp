#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nekmini/comm.hpp"

namespace nekmini {

enum class GsOp { add, min, max, mul };
enum class GsStrategy { pairwise, crystal_router, all_reduce };

const char* to_string(GsStrategy s);
GsStrategy parse_strategy(const std::string& s);

// A routed record for the crystal router: payload bytes addressed to a rank.
struct Packet {
  int src = 0;
  int dst = 0;
  Bytes data;
};

// Generalized all-to-all over a hypercube, high bit first. Ranks at or above the
// largest power of two fold into partners first and are served in a final round.
// Returns the packets addressed to this rank, sorted by source (stable).
std::vector<Packet> crystal_router(Comm& comm, std::vector<Packet> outgoing, int* rounds = nullptr);

// QQ^T topology for one rank. Built collectively by gs_setup.
class GsHandle {
 public:
  size_t local_count() const { return n_; }
  const std::vector<int>& neighbors() const { return neighbors_; }
  int num_neighbors() const { return static_cast<int>(neighbors_.size()); }
  GsStrategy strategy() const { return strategy_; }
  void set_strategy(GsStrategy s) { strategy_ = s; }

  // Elements (by local index) with entries shared with another rank, and the rest.
  const std::vector<std::int64_t>& boundary_elements() const { return boundary_elements_; }
  const std::vector<std::int64_t>& interior_elements() const { return interior_elements_; }

  // Number of shared-id groups held by this rank (including rank-local duplicates).
  size_t num_groups() const { return group_start_.empty() ? 0 : group_start_.size() - 1; }

  // Crystal router rounds used by the last crystal-router exchange.
  int last_rounds() const { return last_rounds_; }

 private:
  friend GsHandle gs_setup(Comm&, std::span<const std::int64_t>, std::span<const std::int64_t>, int, int);
  template <class T>
  friend struct GsExec;

  size_t n_ = 0;
  GsStrategy strategy_ = GsStrategy::pairwise;
  std::vector<int> neighbors_;
  // Per neighbor: local indices packed into the message for it, and the slice of
  // the concatenated receive buffer holding its message.
  std::vector<std::vector<std::int64_t>> send_idx_;
  std::vector<size_t> recv_offset_;  // size neighbors+1
  // all_reduce: indices of this rank's block, and per neighbor the positions in the
  // neighbor's block that make up its message to us.
  std::vector<std::int64_t> block_idx_;
  std::vector<std::vector<std::int64_t>> block_pick_;
  // Reduction plan. Group g has targets [tgt_start_[g], tgt_start_[g+1]) and
  // contributions [group_start_[g], group_start_[g+1]) in canonical order. A
  // contribution c >= 0 is a local index; c < 0 is receive slot -c-1.
  std::vector<std::int64_t> group_start_, sources_;
  std::vector<std::int64_t> tgt_start_, targets_;
  std::vector<std::int64_t> boundary_elements_, interior_elements_;
  int last_rounds_ = 0;
};

// Collective. keys, when given, fix the canonical accumulation order of every
// shared id (ascending key); the default is ascending (rank, local index).
// points_per_element > 0 enables the boundary/interior element classification.
// declared_ranks >= 0 is checked against the communicator size on every rank.
GsHandle gs_setup(Comm& comm, std::span<const std::int64_t> ids, std::span<const std::int64_t> keys = {},
                  int points_per_element = 0, int declared_ranks = -1);

template <class T>
void gs_op(GsHandle& h, Comm& comm, std::span<T> field, GsOp op);

// Runs local_work on the boundary elements, starts the exchange, runs local_work
// on the interior elements, then completes the exchange and reduction.
template <class T>
void gs_op_overlapped(GsHandle& h, Comm& comm, std::span<T> field, GsOp op,
                      const std::function<void(std::span<const std::int64_t>)>& local_work);

// Times each strategy over `trials` exchanges on the virtual clock and keeps the
// one with the lowest max-over-ranks median. The optional callback replaces the
// default exchange as the timed operation.
GsStrategy gs_autotune(GsHandle& h, Comm& comm, int trials,
                       const std::function<void(GsHandle&)>& trial = {});

}  // namespace nekmini
