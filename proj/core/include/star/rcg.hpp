#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "star/schedule.hpp"

namespace star {

/// Pairwise relation between two data of a trace.
struct PairRelation {
  bool share_ok = false;  ///< no same-cycle write and no same-cycle read
  bool fifo_ok = false;   ///< one queue reproduces the read order
  bool lifo_ok = false;   ///< one stack reproduces the read order
};

/// Resource compatibility graph: one node per datum, edges labelled with the
/// storage kinds the two endpoints may share.
///
/// For x written before y: FIFO-compatible when x is also read first;
/// LIFO-compatible when y is read first (nested lifetimes) or x is read no
/// later than the cycle y is written (disjoint lifetimes, reads precede
/// writes within a cycle).
class CompatibilityGraph {
 public:
  explicit CompatibilityGraph(const AccessTrace& trace);

  std::size_t size() const noexcept { return n_; }

  PairRelation relation(DatumId x, DatumId y) const;
  bool share_ok(DatumId x, DatumId y) const { return relation(x, y).share_ok; }
  bool fifo_ok(DatumId x, DatumId y) const { return relation(x, y).fifo_ok; }
  bool lifo_ok(DatumId x, DatumId y) const { return relation(x, y).lifo_ok; }

  /// True iff every pair in the group is FIFO-compatible. Throws
  /// Error(UnknownDatum) for ids outside the graph or an empty group.
  bool fifo_group_valid(std::span<const DatumId> group) const;
  bool lifo_group_valid(std::span<const DatumId> group) const;

  /// Edge list "x y F|L|FL|-" for x < y.
  void dump(std::ostream& out) const;

 private:
  enum : std::uint8_t { kShare = 1, kFifo = 2, kLifo = 4 };

  std::uint8_t bits(DatumId x, DatumId y) const;
  void check_group(std::span<const DatumId> group) const;

  std::size_t n_ = 0;
  std::vector<std::uint8_t> flags_;  // row-major n*n, symmetric
};

CompatibilityGraph build_graph(const AccessTrace& trace);

}  // namespace star
