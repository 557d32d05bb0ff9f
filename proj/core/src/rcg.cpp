#include "star/rcg.hpp"

#include <ostream>
#include <string>
#include <utility>

#include "star/error.hpp"

namespace star {

CompatibilityGraph::CompatibilityGraph(const AccessTrace& trace)
    : n_(trace.size()), flags_(n_ * n_, 0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const AccessEvent* x = &trace.events[i];
      const AccessEvent* y = &trace.events[j];
      if (std::pair(y->write_cycle, y->write_port) < std::pair(x->write_cycle, x->write_port)) {
        std::swap(x, y);
      }
      std::uint8_t f = 0;
      if (x->write_cycle != y->write_cycle && x->read_cycle != y->read_cycle) {
        f |= kShare;
        const bool x_read_first =
            std::pair(x->read_cycle, x->read_port) < std::pair(y->read_cycle, y->read_port);
        const bool disjoint = x->read_cycle <= y->write_cycle;
        if (x_read_first) f |= kFifo;
        if (!x_read_first || disjoint) f |= kLifo;
      }
      flags_[i * n_ + j] = f;
      flags_[j * n_ + i] = f;
    }
  }
}

std::uint8_t CompatibilityGraph::bits(DatumId x, DatumId y) const {
  if (x >= n_ || y >= n_) {
    throw Error(ErrorKind::UnknownDatum, "datum " + std::to_string(x >= n_ ? x : y) +
                                             " is not in the graph");
  }
  if (x == y) return kShare | kFifo | kLifo;
  return flags_[static_cast<std::size_t>(x) * n_ + y];
}

PairRelation CompatibilityGraph::relation(DatumId x, DatumId y) const {
  const auto f = bits(x, y);
  return {(f & kShare) != 0, (f & kFifo) != 0, (f & kLifo) != 0};
}

void CompatibilityGraph::check_group(std::span<const DatumId> group) const {
  if (group.empty()) throw Error(ErrorKind::UnknownDatum, "empty group");
  for (DatumId d : group) {
    if (d >= n_) {
      throw Error(ErrorKind::UnknownDatum, "datum " + std::to_string(d) + " is not in the graph");
    }
  }
}

bool CompatibilityGraph::fifo_group_valid(std::span<const DatumId> group) const {
  check_group(group);
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      if (group[i] == group[j] || !(bits(group[i], group[j]) & kFifo)) return false;
    }
  }
  return true;
}

bool CompatibilityGraph::lifo_group_valid(std::span<const DatumId> group) const {
  check_group(group);
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      if (group[i] == group[j] || !(bits(group[i], group[j]) & kLifo)) return false;
    }
  }
  return true;
}

void CompatibilityGraph::dump(std::ostream& out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const auto f = flags_[i * n_ + j];
      const char* label = "-";
      if ((f & kFifo) && (f & kLifo)) {
        label = "FL";
      } else if (f & kFifo) {
        label = "F";
      } else if (f & kLifo) {
        label = "L";
      }
      out << i << ' ' << j << ' ' << label << '\n';
    }
  }
}

CompatibilityGraph build_graph(const AccessTrace& trace) { return CompatibilityGraph(trace); }

}  // namespace star
