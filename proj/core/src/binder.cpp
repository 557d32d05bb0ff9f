#include "star/binder.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>

#include "star/error.hpp"

namespace star {

namespace {

struct Item {
  DatumId datum;
  Cycle write_cycle;
  Cycle read_cycle;
  PortId write_port;
  PortId read_port;
  // Time points on a half-cycle grid: reads at 2t, writes at 2t+1.
  std::int64_t open() const { return 2 * write_cycle + 1; }
  std::int64_t close() const { return 2 * read_cycle; }
};

struct Candidate {
  StorageKind kind;
  std::vector<DatumId> data;
  double score;
};

std::vector<PortId> sorted_unique(std::vector<PortId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Longest order-preserving chain: strictly increasing write cycle and
// strictly increasing read cycle. Sorting ties on write cycle by descending
// read cycle lets a strict LIS pick at most one datum per write cycle.
std::vector<DatumId> longest_fifo_chain(std::vector<Item> items) {
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.write_cycle != b.write_cycle) return a.write_cycle < b.write_cycle;
    if (a.read_cycle != b.read_cycle) return a.read_cycle > b.read_cycle;
    return a.datum < b.datum;
  });
  std::vector<std::size_t> tails;  // index of the smallest tail per length
  std::vector<std::ptrdiff_t> parent(items.size(), -1);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Cycle rc = items[i].read_cycle;
    auto pos = std::lower_bound(tails.begin(), tails.end(), rc,
                                [&](std::size_t t, Cycle v) { return items[t].read_cycle < v; });
    const auto len = static_cast<std::size_t>(pos - tails.begin());
    if (len > 0) parent[i] = static_cast<std::ptrdiff_t>(tails[len - 1]);
    if (pos == tails.end()) {
      tails.push_back(i);
    } else {
      *pos = i;
    }
  }
  std::vector<DatumId> chain;
  if (tails.empty()) return chain;
  for (auto i = static_cast<std::ptrdiff_t>(tails.back()); i >= 0; i = parent[i]) {
    chain.push_back(items[static_cast<std::size_t>(i)].datum);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

// Largest laminar sub-family of lifetimes (pairwise nested or disjoint).
// nested_size[i] is the size of the best family rooted at interval i; a
// family inside a window is a weighted interval scheduling problem over the
// intervals strictly inside it.
class LaminarSolver {
 public:
  explicit LaminarSolver(std::vector<Item> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) {
      if (a.close() != b.close()) return a.close() < b.close();
      if (a.open() != b.open()) return a.open() > b.open();
      return a.datum < b.datum;
    });
    nested_size_.assign(items_.size(), 0);
    for (std::size_t i = 0; i < items_.size(); ++i) {
      nested_size_[i] = 1 + schedule(inside(i), nullptr);
    }
  }

  std::vector<DatumId> solve() const {
    std::vector<std::size_t> all(items_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<DatumId> out;
    collect(all, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  // Intervals strictly nested inside interval i; all precede i in close order.
  std::vector<std::size_t> inside(std::size_t i) const {
    std::vector<std::size_t> list;
    for (std::size_t j = 0; j < i; ++j) {
      if (items_[j].open() > items_[i].open() && items_[j].close() < items_[i].close()) {
        list.push_back(j);
      }
    }
    return list;
  }

  // Max total nested_size over pairwise-disjoint members of list (sorted by
  // close). Optionally returns the chosen members.
  std::size_t schedule(const std::vector<std::size_t>& list,
                       std::vector<std::size_t>* chosen) const {
    const std::size_t c = list.size();
    std::vector<std::size_t> g(c + 1, 0);
    std::vector<std::size_t> pred(c, 0);
    for (std::size_t k = 0; k < c; ++k) {
      const auto open = items_[list[k]].open();
      auto it = std::lower_bound(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k), open,
                                 [&](std::size_t t, std::int64_t v) { return items_[t].close() < v; });
      pred[k] = static_cast<std::size_t>(it - list.begin());
      g[k + 1] = std::max(g[k], nested_size_[list[k]] + g[pred[k]]);
    }
    if (chosen) {
      for (std::size_t k = c; k > 0;) {
        if (g[k] == g[k - 1]) {
          --k;
        } else {
          chosen->push_back(list[k - 1]);
          k = pred[k - 1];
        }
      }
    }
    return g[c];
  }

  void collect(const std::vector<std::size_t>& list, std::vector<DatumId>& out) const {
    std::vector<std::size_t> chosen;
    schedule(list, &chosen);
    for (std::size_t i : chosen) {
      out.push_back(items_[i].datum);
      collect(inside(i), out);
    }
  }

  std::vector<Item> items_;
  std::vector<std::size_t> nested_size_;
};

// Best-scoring write-order prefix of a chain that passes the size and
// metric filters. Prefix peaks are prefix maxima of the occupancy seen
// right after each push, so one sweep evaluates every prefix.
std::optional<Candidate> best_prefix(StorageKind kind, const std::vector<DatumId>& chain,
                                     const AccessTrace& trace, const ExplorationParams& params) {
  std::priority_queue<Cycle, std::vector<Cycle>, std::greater<>> resident;
  std::vector<bool> sinks(trace.config.p_out, false);
  std::size_t sink_count = 0;
  std::uint32_t peak = 0;
  std::optional<Candidate> best;
  std::size_t best_len = 0;
  const std::size_t limit = std::min<std::size_t>(chain.size(), params.max_size);
  for (std::size_t k = 0; k < limit; ++k) {
    const auto& e = trace.events[chain[k]];
    while (!resident.empty() && resident.top() <= e.write_cycle) resident.pop();
    resident.push(e.read_cycle);
    peak = std::max(peak, static_cast<std::uint32_t>(resident.size()));
    if (!sinks[e.read_port]) {
      sinks[e.read_port] = true;
      ++sink_count;
    }
    const std::size_t len = k + 1;
    if (len < params.min_size) continue;
    const double depth = pow2ceil(peak);
    const double use = static_cast<double>(len) / depth;
    const double fill = 100.0 * peak / depth;
    if (use < params.min_use_factor || fill < params.min_fill_pct) continue;
    const double score = params.w_size * static_cast<double>(len) + params.w_use * use +
                         params.w_fill * fill / 100.0 -
                         params.w_mux * static_cast<double>(sink_count);
    if (!best || score >= best->score) {
      best = Candidate{kind, {}, score};
      best_len = len;
    }
  }
  if (best) best->data.assign(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(best_len));
  return best;
}

// Strict preference: higher score, then FIFO before LIFO, then lowest first
// datum.
bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.kind != b.kind) return a.kind == StorageKind::Fifo;
  return a.data.front() < b.data.front();
}

std::optional<Candidate> best_candidate(const std::vector<Item>& items, const AccessTrace& trace,
                                        const ExplorationParams& params) {
  std::optional<Candidate> best;
  if (items.empty()) return best;
  auto consider = [&](std::optional<Candidate> c) {
    if (c && (!best || better(*c, *best))) best = std::move(c);
  };
  if (params.enable_fifo) {
    consider(best_prefix(StorageKind::Fifo, longest_fifo_chain(items), trace, params));
  }
  if (params.enable_lifo) {
    consider(best_prefix(StorageKind::Lifo, LaminarSolver(items).solve(), trace, params));
  }
  return best;
}

Binding finalize(std::vector<StorageStructure> structures, std::size_t n) {
  Binding b;
  b.assignment.assign(n, 0);
  for (std::size_t i = 0; i < structures.size(); ++i) {
    structures[i].id = static_cast<std::uint32_t>(i);
    for (DatumId d : structures[i].data) b.assignment[d] = static_cast<std::uint32_t>(i);
  }
  b.structures = std::move(structures);
  return b;
}

std::string join(const std::vector<PortId>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s.empty() ? "-" : s;
}

}  // namespace

const char* to_string(StorageKind kind) {
  switch (kind) {
    case StorageKind::Fifo: return "FIFO";
    case StorageKind::Lifo: return "LIFO";
    case StorageKind::Reg: return "REG";
  }
  return "?";
}

StorageKind storage_kind_from_string(const std::string& text) {
  if (text == "FIFO") return StorageKind::Fifo;
  if (text == "LIFO") return StorageKind::Lifo;
  if (text == "REG") return StorageKind::Reg;
  throw Error(ErrorKind::Parse, "unknown storage kind '" + text + "'");
}

void ExplorationParams::validate() const {
  if (min_size < 1) throw Error(ErrorKind::InvalidParams, "min_size must be >= 1");
  if (max_size < min_size) throw Error(ErrorKind::InvalidParams, "max_size must be >= min_size");
  if (min_fill_pct < 0.0 || min_fill_pct > 100.0) {
    throw Error(ErrorKind::InvalidParams, "min_fill_pct must lie in [0, 100]");
  }
  if (min_use_factor < 0.0) throw Error(ErrorKind::InvalidParams, "min_use_factor must be >= 0");
  if (!enable_fifo && !enable_lifo && !enable_reg) {
    throw Error(ErrorKind::InvalidParams, "at least one storage kind must be enabled");
  }
  if (w_size < 0.0 || w_use < 0.0 || w_fill < 0.0 || w_mux < 0.0) {
    throw Error(ErrorKind::InvalidParams, "weights must be nonnegative");
  }
}

std::string ExplorationParams::summary() const {
  std::ostringstream os;
  os << "fifo=" << enable_fifo << ";lifo=" << enable_lifo << ";reg=" << enable_reg
     << ";min_size=" << min_size << ";max_size=" << max_size << ";min_use=" << min_use_factor
     << ";min_fill=" << min_fill_pct << ";mux=" << mux_factor_on << ";w_size=" << w_size
     << ";w_use=" << w_use << ";w_fill=" << w_fill << ";w_mux=" << w_mux;
  return os.str();
}

void Binding::validate(std::size_t n) const {
  if (assignment.size() != n) {
    throw Error(ErrorKind::Validation, "assignment covers " + std::to_string(assignment.size()) +
                                           " data, expected " + std::to_string(n));
  }
  std::vector<int> seen(n, 0);
  for (std::size_t i = 0; i < structures.size(); ++i) {
    const auto& s = structures[i];
    if (s.id != i) throw Error(ErrorKind::Validation, "structure ids must be dense");
    if (s.data.empty()) {
      throw Error(ErrorKind::Validation, "structure " + std::to_string(i) + " is empty");
    }
    if (s.kind == StorageKind::Reg && (s.data.size() != 1 || s.depth != 1)) {
      throw Error(ErrorKind::Validation, "register " + std::to_string(i) +
                                             " must hold one datum at depth 1");
    }
    if (s.traffic != s.data.size()) {
      throw Error(ErrorKind::Validation, "structure " + std::to_string(i) +
                                             " traffic differs from its data count");
    }
    for (DatumId d : s.data) {
      if (d >= n) throw Error(ErrorKind::UnknownDatum, "datum " + std::to_string(d) + " out of range");
      if (seen[d]++) {
        throw Error(ErrorKind::Validation, "datum " + std::to_string(d) + " bound twice");
      }
      if (assignment[d] != i) {
        throw Error(ErrorKind::Validation, "assignment of datum " + std::to_string(d) +
                                               " disagrees with structure " + std::to_string(i));
      }
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (!seen[d]) throw Error(ErrorKind::Validation, "datum " + std::to_string(d) + " unbound");
  }
}

std::uint32_t pow2ceil(std::uint64_t value) {
  std::uint64_t p = 1;
  while (p < value) p <<= 1;
  return static_cast<std::uint32_t>(p);
}

std::uint32_t peak_occupancy(std::span<const DatumId> data, const AccessTrace& trace) {
  std::vector<const AccessEvent*> ev;
  ev.reserve(data.size());
  for (DatumId d : data) ev.push_back(&trace.events.at(d));
  std::sort(ev.begin(), ev.end(), [](const AccessEvent* a, const AccessEvent* b) {
    return std::pair(a->write_cycle, a->write_port) < std::pair(b->write_cycle, b->write_port);
  });
  std::priority_queue<Cycle, std::vector<Cycle>, std::greater<>> resident;
  std::uint32_t peak = 0;
  for (const auto* e : ev) {
    while (!resident.empty() && resident.top() <= e->write_cycle) resident.pop();
    resident.push(e->read_cycle);
    peak = std::max(peak, static_cast<std::uint32_t>(resident.size()));
  }
  return peak;
}

StorageStructure make_structure(StorageKind kind, std::vector<DatumId> data,
                                const AccessTrace& trace) {
  StorageStructure s;
  s.kind = kind;
  std::sort(data.begin(), data.end(), [&](DatumId a, DatumId b) {
    const auto& ea = trace.events.at(a);
    const auto& eb = trace.events.at(b);
    return std::pair(ea.write_cycle, ea.write_port) < std::pair(eb.write_cycle, eb.write_port);
  });
  s.data = std::move(data);
  s.peak_occupancy = peak_occupancy(s.data, trace);
  s.depth = kind == StorageKind::Reg ? 1 : pow2ceil(s.peak_occupancy);
  s.traffic = static_cast<std::uint32_t>(s.data.size());
  std::vector<PortId> src;
  std::vector<PortId> dst;
  s.first_write = trace.events.at(s.data.front()).write_cycle;
  s.last_read = s.first_write;
  for (DatumId d : s.data) {
    const auto& e = trace.events[d];
    src.push_back(e.write_port);
    dst.push_back(e.read_port);
    s.first_write = std::min(s.first_write, e.write_cycle);
    s.last_read = std::max(s.last_read, e.read_cycle);
  }
  s.source_ports = sorted_unique(std::move(src));
  s.sink_ports = sorted_unique(std::move(dst));
  return s;
}

double use_factor(const StorageStructure& s) {
  return static_cast<double>(s.traffic) / static_cast<double>(s.depth);
}

double fill_pct(const StorageStructure& s) {
  return 100.0 * static_cast<double>(s.peak_occupancy) / static_cast<double>(s.depth);
}

Binding bind(const AccessTrace& trace, const CompatibilityGraph& graph,
             const ExplorationParams& params) {
  params.validate();
  const std::size_t n = trace.size();
  if (graph.size() != n) {
    throw Error(ErrorKind::Validation, "graph and trace disagree on the frame length");
  }
  std::vector<bool> bound(n, false);
  std::vector<StorageStructure> structures;

  // Candidate pools: one per source port under the mux factor, else one.
  const std::size_t pools = params.mux_factor_on ? trace.config.p_in : 1;
  auto pool_of = [&](DatumId d) -> std::size_t {
    return params.mux_factor_on ? trace.events[d].write_port : 0;
  };
  std::vector<std::optional<Candidate>> cache(pools);
  std::vector<bool> stale(pools, true);

  if (params.enable_fifo || params.enable_lifo) {
    for (;;) {
      for (std::size_t p = 0; p < pools; ++p) {
        if (!stale[p]) continue;
        std::vector<Item> items;
        for (std::size_t d = 0; d < n; ++d) {
          if (bound[d] || pool_of(static_cast<DatumId>(d)) != p) continue;
          const auto& e = trace.events[d];
          items.push_back({e.datum, e.write_cycle, e.read_cycle, e.write_port, e.read_port});
        }
        cache[p] = best_candidate(items, trace, params);
        stale[p] = false;
      }
      std::optional<std::size_t> pick;
      for (std::size_t p = 0; p < pools; ++p) {
        if (cache[p] && (!pick || better(*cache[p], *cache[*pick]))) pick = p;
      }
      if (!pick) break;
      Candidate c = std::move(*cache[*pick]);
      cache[*pick].reset();
      stale[*pick] = true;
      for (DatumId d : c.data) bound[d] = true;
      structures.push_back(make_structure(c.kind, std::move(c.data), trace));
    }
  }

  std::vector<DatumId> leftover;
  for (std::size_t d = 0; d < n; ++d) {
    if (!bound[d]) leftover.push_back(static_cast<DatumId>(d));
  }
  if (!leftover.empty() && !params.enable_reg) {
    std::string list;
    for (std::size_t i = 0; i < leftover.size(); ++i) {
      if (i) list += ' ';
      list += std::to_string(leftover[i]);
    }
    throw Error(ErrorKind::Infeasible,
                "registers are disabled but no FIFO/LIFO can hold data: " + list);
  }
  for (DatumId d : leftover) structures.push_back(make_structure(StorageKind::Reg, {d}, trace));
  return finalize(std::move(structures), n);
}

Binding merge(const Binding& binding, const AccessTrace& trace, const ExplorationParams& params) {
  std::vector<StorageStructure> s = binding.structures;
  std::vector<bool> alive(s.size(), true);
  auto mergeable = [&](const StorageStructure& a, const StorageStructure& b) {
    if (a.kind != b.kind || a.kind == StorageKind::Reg) return false;
    if (!(a.last_read < b.first_write || b.last_read < a.first_write)) return false;
    if (a.data.size() + b.data.size() > params.max_size) return false;
    if (params.mux_factor_on && a.source_ports != b.source_ports) return false;
    return true;
  };

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (alive[i]) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s[a].first_write < s[b].first_write;
    });
    for (std::size_t x = 0; x < order.size(); ++x) {
      const std::size_t a = order[x];
      if (!alive[a]) continue;
      for (std::size_t y = x + 1; y < order.size(); ++y) {
        const std::size_t b = order[y];
        if (!alive[b] || !mergeable(s[a], s[b])) continue;
        std::vector<DatumId> data = s[a].data;
        data.insert(data.end(), s[b].data.begin(), s[b].data.end());
        s[a] = make_structure(s[a].kind, std::move(data), trace);
        alive[b] = false;
        changed = true;
      }
    }
  }

  std::vector<StorageStructure> kept;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (alive[i]) kept.push_back(std::move(s[i]));
  }
  return finalize(std::move(kept), binding.assignment.size());
}

Binding oracle_bind(const AccessTrace& trace, const CompatibilityGraph& graph,
                    const ExplorationParams& params) {
  params.validate();
  const std::size_t n = trace.size();
  if (n > 12) {
    throw Error(ErrorKind::TooLarge, "oracle_bind enumerates set partitions; n=" +
                                         std::to_string(n) + " exceeds 12");
  }

  struct Block {
    std::vector<DatumId> data;
    bool fifo = true;
    bool lifo = true;
  };
  // Cost of one block as (memory points, kind); nullopt when no kind fits.
  auto block_cost = [&](const Block& b) -> std::optional<std::pair<std::uint32_t, StorageKind>> {
    const bool mux_ok = !params.mux_factor_on || [&] {
      for (DatumId d : b.data) {
        if (trace.events[d].write_port != trace.events[b.data.front()].write_port) return false;
      }
      return true;
    }();
    if (b.data.size() == 1 && params.enable_reg) return std::pair{1u, StorageKind::Reg};
    if (!mux_ok || b.data.size() < params.min_size || b.data.size() > params.max_size) {
      return std::nullopt;
    }
    const auto peak = peak_occupancy(b.data, trace);
    const auto depth = pow2ceil(peak);
    const double use = static_cast<double>(b.data.size()) / depth;
    const double fill = 100.0 * peak / depth;
    if (use < params.min_use_factor || fill < params.min_fill_pct) return std::nullopt;
    if (b.fifo && params.enable_fifo) return std::pair{depth, StorageKind::Fifo};
    if (b.lifo && params.enable_lifo) return std::pair{depth, StorageKind::Lifo};
    return std::nullopt;
  };

  std::vector<Block> blocks;
  std::optional<std::pair<std::uint64_t, std::size_t>> best_cost;
  std::vector<std::pair<std::vector<DatumId>, StorageKind>> best;

  std::function<void(DatumId)> recurse = [&](DatumId d) {
    if (d == n) {
      std::uint64_t mem = 0;
      std::vector<std::pair<std::vector<DatumId>, StorageKind>> out;
      for (const auto& b : blocks) {
        auto cost = block_cost(b);
        if (!cost) return;
        mem += cost->first;
        out.emplace_back(b.data, cost->second);
      }
      const std::pair<std::uint64_t, std::size_t> key{mem, blocks.size()};
      if (!best_cost || key < *best_cost) {
        best_cost = key;
        best = std::move(out);
      }
      return;
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      bool fifo = blocks[i].fifo;
      bool lifo = blocks[i].lifo;
      for (DatumId other : blocks[i].data) {
        const auto rel = graph.relation(other, d);
        fifo = fifo && rel.fifo_ok;
        lifo = lifo && rel.lifo_ok;
      }
      if (!fifo && !lifo) continue;
      // Index, not reference: deeper calls may reallocate the vector.
      const Block saved = blocks[i];
      blocks[i].data.push_back(d);
      blocks[i].fifo = fifo;
      blocks[i].lifo = lifo;
      recurse(d + 1);
      blocks[i] = saved;
    }
    blocks.push_back(Block{{d}, true, true});
    recurse(d + 1);
    blocks.pop_back();
  };
  recurse(0);

  if (!best_cost) throw Error(ErrorKind::Infeasible, "no valid partition under these parameters");
  std::vector<StorageStructure> structures;
  for (auto& [data, kind] : best) structures.push_back(make_structure(kind, std::move(data), trace));
  return finalize(std::move(structures), n);
}

std::uint64_t memory_points(const Binding& binding) {
  std::uint64_t total = 0;
  for (const auto& s : binding.structures) total += s.depth;
  return total;
}

std::uint64_t structures_to_control(const Binding& binding, std::size_t mux_count) {
  return binding.structures.size() + mux_count;
}

void write_binding(const Binding& binding, std::ostream& out) {
  for (const auto& s : binding.structures) {
    out << s.id << ' ' << to_string(s.kind) << ' ' << s.depth << ' ' << s.peak_occupancy << ' '
        << s.traffic << " src=" << join(s.source_ports) << " dst=" << join(s.sink_ports)
        << " data=";
    for (std::size_t i = 0; i < s.data.size(); ++i) out << (i ? "," : "") << s.data[i];
    out << '\n';
  }
}

}  // namespace star
