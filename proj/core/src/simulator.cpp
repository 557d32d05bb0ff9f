#include "star/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>

#include "star/error.hpp"

namespace star {

namespace {

class StorageModel {
 public:
  explicit StorageModel(const StorageStructure& s) : kind_(s.kind), depth_(s.depth) {}

  std::size_t size() const noexcept { return items_.size(); }
  bool full() const noexcept { return items_.size() >= depth_; }

  std::optional<DatumId> pop() {
    if (items_.empty()) return std::nullopt;
    DatumId d;
    if (kind_ == StorageKind::Fifo) {
      d = items_.front();
      items_.pop_front();
    } else {
      d = items_.back();
      items_.pop_back();
    }
    return d;
  }

  void push(DatumId d) {
    if (kind_ == StorageKind::Reg) items_.clear();
    items_.push_back(d);
  }

 private:
  StorageKind kind_;
  std::size_t depth_;
  std::deque<DatumId> items_;
};

}  // namespace

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::WrongDatum: return "wrong-datum";
    case ViolationKind::Overflow: return "overflow";
    case ViolationKind::Underflow: return "underflow";
    case ViolationKind::DoubleAccess: return "double-access";
  }
  return "?";
}

std::string Violation::describe() const {
  std::string s = std::string(to_string(kind)) + " at cycle " + std::to_string(cycle) +
                  " on structure " + std::to_string(structure) + ": datum " +
                  std::to_string(expected);
  if (observed) s += " (got " + std::to_string(*observed) + ")";
  return s;
}

SimReport simulate(const AccessTrace& trace, const Binding& binding) {
  const std::size_t n = trace.size();
  if (binding.assignment.size() != n) {
    throw Error(ErrorKind::Validation, "binding does not cover the trace's data");
  }
  for (DatumId d = 0; d < n; ++d) {
    if (binding.assignment[d] >= binding.structures.size()) {
      throw Error(ErrorKind::Validation, "datum " + std::to_string(d) +
                                             " assigned to unknown structure " +
                                             std::to_string(binding.assignment[d]));
    }
  }
  SimReport report;
  report.cycles = trace.total_cycles;
  report.structures.resize(binding.structures.size());

  std::vector<StorageModel> models;
  models.reserve(binding.structures.size());
  for (const auto& s : binding.structures) models.emplace_back(s);

  std::map<Cycle, std::vector<DatumId>> reads;
  std::map<Cycle, std::vector<DatumId>> writes;
  for (const auto& e : trace.events) {
    reads[e.read_cycle].push_back(e.datum);
    writes[e.write_cycle].push_back(e.datum);
  }
  for (auto& [cycle, list] : reads) {
    std::sort(list.begin(), list.end(), [&](DatumId a, DatumId b) {
      return trace.events[a].read_port < trace.events[b].read_port;
    });
  }
  for (auto& [cycle, list] : writes) {
    std::sort(list.begin(), list.end(), [&](DatumId a, DatumId b) {
      return trace.events[a].write_port < trace.events[b].write_port;
    });
  }

  std::vector<Cycle> last_pop(binding.structures.size(), -1);
  std::vector<Cycle> last_push(binding.structures.size(), -1);

  for (Cycle t = 0; t < trace.total_cycles; ++t) {
    if (auto it = reads.find(t); it != reads.end()) {
      for (DatumId d : it->second) {
        const std::uint32_t sid = binding.assignment[d];
        if (last_pop[sid] == t) {
          report.violations.push_back({ViolationKind::DoubleAccess, t, sid, d, std::nullopt});
        }
        last_pop[sid] = t;
        auto got = models[sid].pop();
        report.outputs.push_back({t, trace.events[d].read_port, got});
        if (!got) {
          report.violations.push_back({ViolationKind::Underflow, t, sid, d, std::nullopt});
        } else if (*got != d) {
          report.violations.push_back({ViolationKind::WrongDatum, t, sid, d, got});
        }
      }
    }
    if (auto it = writes.find(t); it != writes.end()) {
      for (DatumId d : it->second) {
        const std::uint32_t sid = binding.assignment[d];
        if (last_push[sid] == t) {
          report.violations.push_back({ViolationKind::DoubleAccess, t, sid, d, std::nullopt});
        }
        last_push[sid] = t;
        if (models[sid].full()) {
          report.violations.push_back({ViolationKind::Overflow, t, sid, d, std::nullopt});
        }
        models[sid].push(d);
        auto& stats = report.structures[sid];
        ++stats.observed_traffic;
        stats.observed_peak =
            std::max(stats.observed_peak, static_cast<std::uint32_t>(models[sid].size()));
      }
    }
  }

  bool schedule_match = report.outputs.size() == n;
  if (schedule_match) {
    const auto order = trace.read_order();
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = trace.events[order[j]];
      const auto& o = report.outputs[j];
      if (o.cycle != e.read_cycle || o.port != e.read_port || o.datum != e.datum) {
        schedule_match = false;
        break;
      }
    }
  }
  report.ok = report.violations.empty() && schedule_match;
  return report;
}

LatencyInfo latency(const AccessTrace& trace) {
  LatencyInfo info;
  info.first_read = trace.first_read;
  for (const auto& e : trace.events) {
    info.max_latency = std::max(info.max_latency, e.read_cycle - e.write_cycle);
  }
  return info;
}

void write_output_log(const SimReport& report, std::ostream& out) {
  for (const auto& o : report.outputs) {
    out << "cycle " << o.cycle << " port " << o.port << " -> datum ";
    if (o.datum) {
      out << *o.datum;
    } else {
      out << '-';
    }
    out << '\n';
  }
}

}  // namespace star
