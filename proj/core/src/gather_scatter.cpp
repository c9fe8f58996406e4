#include "nekmini/gather_scatter.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "nekmini/error.hpp"

namespace nekmini {

namespace {

constexpr int kTagCrystal = 700001;
constexpr int kTagPairwise = 700002;
constexpr int kTagGather = 700003;
constexpr int kTagBcast = 700004;
constexpr int kTagSetup = 700005;
constexpr int kTagCheck = 700006;

void put_i64(Bytes& b, std::int64_t v) {
  const size_t o = b.size();
  b.resize(o + sizeof(v));
  std::memcpy(b.data() + o, &v, sizeof(v));
}

std::int64_t get_i64(const Bytes& b, size_t& pos) {
  std::int64_t v;
  std::memcpy(&v, b.data() + pos, sizeof(v));
  pos += sizeof(v);
  return v;
}

Bytes pack_packets(const std::vector<Packet>& ps) {
  Bytes b;
  for (const Packet& p : ps) {
    put_i64(b, p.src);
    put_i64(b, p.dst);
    put_i64(b, static_cast<std::int64_t>(p.data.size()));
    b.insert(b.end(), p.data.begin(), p.data.end());
  }
  return b;
}

void unpack_packets(const Bytes& b, std::vector<Packet>& out) {
  size_t pos = 0;
  while (pos < b.size()) {
    Packet p;
    p.src = static_cast<int>(get_i64(b, pos));
    p.dst = static_cast<int>(get_i64(b, pos));
    const auto n = static_cast<size_t>(get_i64(b, pos));
    p.data.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    out.push_back(std::move(p));
  }
}

}  // namespace

// Crystal router split into a first send (start) and the remaining rounds
// (finish) so an exchange can be overlapped with local work.
class CrystalRun {
 public:
  CrystalRun(Comm& comm, std::vector<Packet> packets) : comm_(comm), held_(std::move(packets)) {
    const int P = comm.size();
    for (const Packet& p : held_)
      if (p.dst < 0 || p.dst >= P)
        throw RoutingError("crystal router: destination " + std::to_string(p.dst) + " >= P=" + std::to_string(P));
    M_ = 1;
    while (2 * M_ <= P) M_ *= 2;
    for (int b = M_ / 2; b >= 1; b /= 2) steps_.push_back(b);
    if (P > M_) {
      steps_.insert(steps_.begin(), kFold);
      steps_.push_back(kUnfold);
    }
  }

  void start() {
    if (!steps_.empty()) send_phase(steps_[0]);
  }

  std::vector<Packet> finish(int* rounds) {
    for (size_t s = 0; s < steps_.size(); ++s) {
      if (s > 0) send_phase(steps_[s]);
      recv_phase(steps_[s]);
    }
    if (rounds) *rounds = static_cast<int>(steps_.size());
    std::stable_sort(held_.begin(), held_.end(), [](const Packet& a, const Packet& b) { return a.src < b.src; });
    return std::move(held_);
  }

 private:
  static constexpr int kFold = -1;
  static constexpr int kUnfold = -2;

  int addr(int rank) const { return rank >= M_ ? rank - M_ : rank; }

  void send_phase(int step) {
    const int r = comm_.rank(), P = comm_.size();
    std::vector<Packet> keep, out;
    int dest = -1;
    if (step == kFold) {
      if (r >= M_) {
        dest = r - M_;
        out = std::move(held_);
      } else {
        keep = std::move(held_);
      }
    } else if (step == kUnfold) {
      if (r < M_ && r + M_ < P) {
        dest = r + M_;
        for (Packet& p : held_) (p.dst == dest ? out : keep).push_back(std::move(p));
      } else {
        keep = std::move(held_);
      }
    } else if (r < M_) {
      dest = r ^ step;
      for (Packet& p : held_) ((addr(p.dst) & step) != (r & step) ? out : keep).push_back(std::move(p));
    } else {
      keep = std::move(held_);
    }
    held_ = std::move(keep);
    if (dest >= 0) comm_.send(dest, kTagCrystal, pack_packets(out));
  }

  void recv_phase(int step) {
    const int r = comm_.rank(), P = comm_.size();
    int src = -1;
    if (step == kFold) {
      if (r < M_ && r + M_ < P) src = r + M_;
    } else if (step == kUnfold) {
      if (r >= M_) src = r - M_;
    } else if (r < M_) {
      src = r ^ step;
    }
    if (src >= 0) unpack_packets(comm_.recv(src, kTagCrystal), held_);
  }

  Comm& comm_;
  std::vector<Packet> held_;
  int M_ = 1;
  std::vector<int> steps_;
};

namespace {

template <class T>
T apply_op(GsOp op, T a, T b) {
  switch (op) {
    case GsOp::add: return a + b;
    case GsOp::min: return std::min(a, b);
    case GsOp::max: return std::max(a, b);
    case GsOp::mul: return a * b;
  }
  return a;
}

}  // namespace

const char* to_string(GsStrategy s) {
  switch (s) {
    case GsStrategy::pairwise: return "pairwise";
    case GsStrategy::crystal_router: return "crystal_router";
    case GsStrategy::all_reduce: return "all_reduce";
  }
  return "?";
}

GsStrategy parse_strategy(const std::string& s) {
  if (s == "pairwise") return GsStrategy::pairwise;
  if (s == "crystal_router") return GsStrategy::crystal_router;
  if (s == "all_reduce") return GsStrategy::all_reduce;
  throw ContractError("unknown gather-scatter strategy '" + s + "'");
}

std::vector<Packet> crystal_router(Comm& comm, std::vector<Packet> outgoing, int* rounds) {
  for (Packet& p : outgoing) p.src = comm.rank();
  CrystalRun run(comm, std::move(outgoing));
  run.start();
  return run.finish(rounds);
}

GsHandle gs_setup(Comm& comm, std::span<const std::int64_t> ids, std::span<const std::int64_t> keys_in,
                  int points_per_element, int declared_ranks) {
  const int P = comm.size(), me = comm.rank();
  {
    const std::int64_t declared = declared_ranks < 0 ? P : declared_ranks;
    auto all = comm.gather<std::int64_t>(std::span<const std::int64_t>(&declared, 1), kTagCheck);
    std::vector<std::int64_t> bad{0};
    for (auto& v : all)
      if (v[0] != P) bad[0] = 1;
    if (comm.bcast(bad, kTagCheck)[0] != 0)
      throw SetupError("gs_setup: ranks disagree on the communicator size " + std::to_string(P));
  }
  if (!keys_in.empty() && keys_in.size() != ids.size()) throw ContractError("gs_setup: keys length mismatch");

  GsHandle h;
  h.n_ = ids.size();
  std::vector<std::int64_t> keys(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0) throw ContractError("gs_setup: negative global id");
    keys[i] = keys_in.empty() ? (static_cast<std::int64_t>(me) << 40) + static_cast<std::int64_t>(i) : keys_in[i];
  }

  // id -> local entries sorted by key
  std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::int64_t>>> local;
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] != 0) local[ids[i]].emplace_back(keys[i], static_cast<std::int64_t>(i));
  for (auto& [id, v] : local) std::sort(v.begin(), v.end());

  // Discovery: every id is reported to its home rank, which tells each holder the
  // other ranks holding it.
  std::vector<Packet> reports(P);
  for (int r = 0; r < P; ++r) reports[r].dst = r;
  for (auto& [id, v] : local) {
    put_i64(reports[id % P].data, id);
    put_i64(reports[id % P].data, static_cast<std::int64_t>(v.size()));
  }
  std::erase_if(reports, [](const Packet& p) { return p.data.empty(); });
  std::map<std::int64_t, std::vector<int>> holders;
  for (const Packet& p : crystal_router(comm, std::move(reports))) {
    size_t pos = 0;
    while (pos < p.data.size()) {
      const std::int64_t id = get_i64(p.data, pos);
      get_i64(p.data, pos);
      holders[id].push_back(p.src);
    }
  }
  std::vector<Packet> replies(P);
  for (int r = 0; r < P; ++r) replies[r].dst = r;
  for (auto& [id, ranks] : holders) {
    if (ranks.size() < 2) continue;
    for (int a : ranks)
      for (int b : ranks)
        if (a != b) {
          put_i64(replies[a].data, id);
          put_i64(replies[a].data, b);
        }
  }
  std::erase_if(replies, [](const Packet& p) { return p.data.empty(); });
  std::map<std::int64_t, std::vector<int>> remote;
  for (const Packet& p : crystal_router(comm, std::move(replies))) {
    size_t pos = 0;
    while (pos < p.data.size()) {
      const std::int64_t id = get_i64(p.data, pos);
      remote[id].push_back(static_cast<int>(get_i64(p.data, pos)));
    }
  }
  for (auto& [id, r] : remote) std::sort(r.begin(), r.end());

  // Neighbors and per-neighbor id lists.
  std::map<int, std::vector<std::int64_t>> ids_with;
  for (auto& [id, ranks] : remote)
    for (int q : ranks) ids_with[q].push_back(id);
  for (auto& [q, v] : ids_with) {
    h.neighbors_.push_back(q);
    std::sort(v.begin(), v.end());
  }

  // This rank's all_reduce block: remote-shared entries sorted by (id, key).
  std::map<std::int64_t, std::int64_t> block_pos;  // local index -> position
  for (auto& [id, v] : local) {
    if (!remote.count(id)) continue;
    for (auto& [k, i] : v) {
      block_pos[i] = static_cast<std::int64_t>(h.block_idx_.size());
      h.block_idx_.push_back(i);
    }
  }

  const size_t nn = h.neighbors_.size();
  h.send_idx_.resize(nn);
  for (size_t a = 0; a < nn; ++a) {
    const int q = h.neighbors_[a];
    Bytes msg;
    for (std::int64_t id : ids_with[q]) {
      const auto& v = local[id];
      put_i64(msg, id);
      put_i64(msg, static_cast<std::int64_t>(v.size()));
      for (auto& [k, i] : v) {
        put_i64(msg, k);
        put_i64(msg, block_pos[i]);
        h.send_idx_[a].push_back(i);
      }
    }
    comm.send(q, kTagSetup, std::move(msg));
  }

  // Remote contributions per id: (key, receive slot).
  std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::int64_t>>> incoming;
  h.recv_offset_.assign(nn + 1, 0);
  h.block_pick_.resize(nn);
  size_t slot = 0;
  for (size_t a = 0; a < nn; ++a) {
    const int q = h.neighbors_[a];
    h.recv_offset_[a] = slot;
    const Bytes msg = comm.recv(q, kTagSetup);
    size_t pos = 0;
    size_t nids = 0;
    while (pos < msg.size()) {
      const std::int64_t id = get_i64(msg, pos);
      const std::int64_t cnt = get_i64(msg, pos);
      if (nids >= ids_with[q].size() || ids_with[q][nids] != id)
        throw SetupError("gs_setup: asymmetric shared-id lists between ranks " + std::to_string(me) + " and " +
                         std::to_string(q));
      ++nids;
      for (std::int64_t c = 0; c < cnt; ++c) {
        const std::int64_t k = get_i64(msg, pos);
        h.block_pick_[a].push_back(get_i64(msg, pos));
        incoming[id].emplace_back(k, static_cast<std::int64_t>(slot++));
      }
    }
  }
  h.recv_offset_[nn] = slot;

  h.group_start_.push_back(0);
  h.tgt_start_.push_back(0);
  for (auto& [id, v] : local) {
    auto it = incoming.find(id);
    if (v.size() < 2 && it == incoming.end()) continue;
    struct Contribution {
      std::int64_t key;
      std::int64_t source;
    };
    std::vector<Contribution> cs;
    for (auto& [k, i] : v) {
      cs.push_back({k, i});
      h.targets_.push_back(i);
    }
    if (it != incoming.end())
      for (auto& [k, s] : it->second) cs.push_back({k, -s - 1});
    std::stable_sort(cs.begin(), cs.end(), [](const Contribution& a, const Contribution& b) { return a.key < b.key; });
    for (auto& c : cs) h.sources_.push_back(c.source);
    h.group_start_.push_back(static_cast<std::int64_t>(h.sources_.size()));
    h.tgt_start_.push_back(static_cast<std::int64_t>(h.targets_.size()));
  }
  if (h.group_start_.size() == 1) {
    h.group_start_.clear();
    h.tgt_start_.clear();
  }

  if (points_per_element > 0) {
    const std::int64_t ne = static_cast<std::int64_t>(ids.size()) / points_per_element;
    std::vector<char> boundary(ne, 0);
    for (auto& list : h.send_idx_)
      for (std::int64_t i : list) boundary[i / points_per_element] = 1;
    for (std::int64_t e = 0; e < ne; ++e) (boundary[e] ? h.boundary_elements_ : h.interior_elements_).push_back(e);
  }
  return h;
}

template <class T>
struct GsExec {
  GsHandle& h;
  Comm& comm;
  std::span<T> field;
  std::vector<T> recv;
  std::unique_ptr<CrystalRun> cr;
  Bytes block_msg;  // all_reduce accumulation
  int gather_level = 0;
  bool gather_done = false;

  GsExec(GsHandle& hh, Comm& c, std::span<T> f) : h(hh), comm(c), field(f) {
    if (f.size() != h.n_) throw ContractError("gs_op: field length does not match handle");
    recv.resize(h.recv_offset_.empty() ? 0 : h.recv_offset_.back());
  }

  Bytes pack_for(size_t a) const {
    Bytes b(h.send_idx_[a].size() * sizeof(T));
    T* out = reinterpret_cast<T*>(b.data());
    for (size_t i = 0; i < h.send_idx_[a].size(); ++i) out[i] = field[h.send_idx_[a][i]];
    return b;
  }

  void store(size_t a, const Bytes& b) {
    const size_t n = h.recv_offset_[a + 1] - h.recv_offset_[a];
    if (b.size() != n * sizeof(T)) throw RoutingError("gs_op: message size mismatch");
    if (n) std::memcpy(recv.data() + h.recv_offset_[a], b.data(), b.size());
  }

  void begin() {
    switch (h.strategy_) {
      case GsStrategy::pairwise:
        for (size_t a = 0; a < h.neighbors_.size(); ++a) comm.send(h.neighbors_[a], kTagPairwise, pack_for(a));
        break;
      case GsStrategy::crystal_router: {
        std::vector<Packet> ps;
        for (size_t a = 0; a < h.neighbors_.size(); ++a) ps.push_back({comm.rank(), h.neighbors_[a], pack_for(a)});
        cr = std::make_unique<CrystalRun>(comm, std::move(ps));
        cr->start();
        break;
      }
      case GsStrategy::all_reduce: {
        put_i64(block_msg, comm.rank());
        put_i64(block_msg, static_cast<std::int64_t>(h.block_idx_.size()));
        const size_t o = block_msg.size();
        block_msg.resize(o + h.block_idx_.size() * sizeof(T));
        T* out = reinterpret_cast<T*>(block_msg.data() + o);
        for (size_t i = 0; i < h.block_idx_.size(); ++i) out[i] = field[h.block_idx_[i]];
        gather_step(true);
        break;
      }
    }
  }

  // Binomial-tree gather to rank 0; with only_first, stops after the first send.
  void gather_step(bool only_first) {
    const int r = comm.rank(), P = comm.size();
    while (!gather_done && (1 << gather_level) < P) {
      const int bit = 1 << gather_level;
      if (r & bit) {
        comm.send(r - bit, kTagGather, std::move(block_msg));
        block_msg.clear();
        gather_done = true;
        return;
      }
      if (only_first) return;
      if (r + bit < P) {
        const Bytes b = comm.recv(r + bit, kTagGather);
        block_msg.insert(block_msg.end(), b.begin(), b.end());
      }
      ++gather_level;
    }
    gather_done = true;
  }

  void end() {
    switch (h.strategy_) {
      case GsStrategy::pairwise:
        for (size_t a = 0; a < h.neighbors_.size(); ++a) store(a, comm.recv(h.neighbors_[a], kTagPairwise));
        break;
      case GsStrategy::crystal_router: {
        int rounds = 0;
        auto got = cr->finish(&rounds);
        h.last_rounds_ = rounds;
        size_t a = 0;
        for (Packet& p : got) {
          while (a < h.neighbors_.size() && h.neighbors_[a] < p.src) ++a;
          if (a == h.neighbors_.size() || h.neighbors_[a] != p.src)
            throw RoutingError("gs_op: unexpected crystal-router packet");
          store(a, p.data);
        }
        break;
      }
      case GsStrategy::all_reduce: {
        gather_step(false);
        Bytes all = comm.bcast(comm.rank() == 0 ? std::move(block_msg) : Bytes{}, kTagBcast);
        std::vector<const T*> blocks(comm.size(), nullptr);
        size_t pos = 0;
        while (pos < all.size()) {
          const auto r = static_cast<int>(get_i64(all, pos));
          const auto n = static_cast<size_t>(get_i64(all, pos));
          blocks[r] = reinterpret_cast<const T*>(all.data() + pos);
          pos += n * sizeof(T);
        }
        for (size_t a = 0; a < h.neighbors_.size(); ++a) {
          const T* src = blocks[h.neighbors_[a]];
          T* dst = recv.data() + h.recv_offset_[a];
          for (size_t i = 0; i < h.block_pick_[a].size(); ++i) dst[i] = src[h.block_pick_[a][i]];
        }
        break;
      }
    }
  }

  void reduce(GsOp op) {
    const size_t ng = h.num_groups();
    for (size_t g = 0; g < ng; ++g) {
      auto val = [&](std::int64_t c) { return c >= 0 ? field[c] : recv[-c - 1]; };
      const std::int64_t s0 = h.group_start_[g], s1 = h.group_start_[g + 1];
      T acc = val(h.sources_[s0]);
      for (std::int64_t s = s0 + 1; s < s1; ++s) acc = apply_op(op, acc, val(h.sources_[s]));
      for (std::int64_t t = h.tgt_start_[g]; t < h.tgt_start_[g + 1]; ++t) field[h.targets_[t]] = acc;
    }
  }
};

template <class T>
void gs_op(GsHandle& h, Comm& comm, std::span<T> field, GsOp op) {
  GsExec<T> ex(h, comm, field);
  ex.begin();
  ex.end();
  ex.reduce(op);
}

template <class T>
void gs_op_overlapped(GsHandle& h, Comm& comm, std::span<T> field, GsOp op,
                      const std::function<void(std::span<const std::int64_t>)>& local_work) {
  GsExec<T> ex(h, comm, field);
  local_work(h.boundary_elements());
  comm.log_event("boundary-work-done");
  ex.begin();
  comm.log_event("exchange-initiated");
  try {
    local_work(h.interior_elements());
  } catch (...) {
    // Drain the in-flight exchange so peers are not left blocked.
    try {
      ex.end();
    } catch (...) {
    }
    throw;
  }
  comm.log_event("interior-work-done");
  ex.end();
  ex.reduce(op);
  comm.log_event("exchange-completed");
}

template void gs_op<double>(GsHandle&, Comm&, std::span<double>, GsOp);
template void gs_op<float>(GsHandle&, Comm&, std::span<float>, GsOp);
template void gs_op_overlapped<double>(GsHandle&, Comm&, std::span<double>, GsOp,
                                       const std::function<void(std::span<const std::int64_t>)>&);
template void gs_op_overlapped<float>(GsHandle&, Comm&, std::span<float>, GsOp,
                                      const std::function<void(std::span<const std::int64_t>)>&);

GsStrategy gs_autotune(GsHandle& h, Comm& comm, int trials, const std::function<void(GsHandle&)>& trial) {
  if (trials < 1) throw ContractError("gs_autotune: trials must be >= 1");
  const GsStrategy order[] = {GsStrategy::pairwise, GsStrategy::crystal_router, GsStrategy::all_reduce};
  std::vector<double> scratch(h.local_count(), 1.0);
  double best_time = 0.0;
  GsStrategy best = GsStrategy::pairwise;
  for (int s = 0; s < 3; ++s) {
    h.set_strategy(order[s]);
    std::vector<double> times;
    for (int t = 0; t < trials; ++t) {
      comm.barrier();
      const double t0 = comm.clock();
      if (trial) {
        trial(h);
      } else {
        std::fill(scratch.begin(), scratch.end(), 1.0);
        gs_op<double>(h, comm, scratch, GsOp::add);
      }
      times.push_back(comm.clock() - t0);
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    const double worst = comm.allreduce_max(median);
    if (s == 0 || worst < best_time) {
      best_time = worst;
      best = order[s];
    }
  }
  std::vector<int> choice{static_cast<int>(best)};
  choice = comm.bcast(choice, kTagBcast);
  h.set_strategy(static_cast<GsStrategy>(choice[0]));
  comm.barrier();
  return h.strategy();
}

}  // namespace nekmini
