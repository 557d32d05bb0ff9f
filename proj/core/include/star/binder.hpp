#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "star/rcg.hpp"
#include "star/schedule.hpp"

namespace star {

enum class StorageKind { Fifo, Lifo, Reg };

const char* to_string(StorageKind kind);
StorageKind storage_kind_from_string(const std::string& text);

/// Metric thresholds and weights steering the binder.
struct ExplorationParams {
  bool enable_fifo = true;
  bool enable_lifo = true;
  bool enable_reg = true;
  /// Bounds on the number of data bound to one FIFO/LIFO.
  std::uint32_t min_size = 2;
  std::uint32_t max_size = 1024;
  /// Minimum traffic / depth.
  double min_use_factor = 0.0;
  /// Minimum 100 * peak occupancy / depth.
  double min_fill_pct = 0.0;
  /// Restrict every FIFO/LIFO to a single source port.
  bool mux_factor_on = false;
  double w_size = 1.0;
  double w_use = 0.0;
  double w_fill = 0.0;
  double w_mux = 0.0;
  /// Carried for reproducibility of generated laws; the binder itself is
  /// deterministic and does not draw random numbers.
  std::uint64_t seed = 1;

  void validate() const;
  /// Compact "key=value;..." form used as the sweep report's config column.
  std::string summary() const;

  bool operator==(const ExplorationParams&) const = default;
};

struct StorageStructure {
  std::uint32_t id = 0;
  StorageKind kind = StorageKind::Reg;
  /// Push order (write order).
  std::vector<DatumId> data;
  std::uint32_t peak_occupancy = 0;
  std::uint32_t depth = 0;
  std::uint32_t traffic = 0;
  std::vector<PortId> source_ports;  // sorted, unique
  std::vector<PortId> sink_ports;    // sorted, unique
  Cycle first_write = 0;
  Cycle last_read = 0;

  bool operator==(const StorageStructure&) const = default;
};

struct Binding {
  std::vector<StorageStructure> structures;
  /// assignment[d] is the index of the structure holding datum d.
  std::vector<std::uint32_t> assignment;

  /// Checks the partition invariant over n data and per-structure sizing
  /// rules. Throws Error(Validation).
  void validate(std::size_t n) const;

  bool operator==(const Binding&) const = default;
};

std::uint32_t pow2ceil(std::uint64_t value);

/// Maximum simultaneous residents of the group, with reads before writes
/// inside a cycle.
std::uint32_t peak_occupancy(std::span<const DatumId> data, const AccessTrace& trace);

/// Builds a structure with derived sizing, ports and activity window.
StorageStructure make_structure(StorageKind kind, std::vector<DatumId> data,
                                const AccessTrace& trace);

double use_factor(const StorageStructure& s);
double fill_pct(const StorageStructure& s);

/// Greedy metric-guided binding: repeatedly extract the best-scoring FIFO
/// chain or LIFO family among unbound data; the rest become registers.
/// Throws Error(Infeasible) when data remain and registers are disabled.
Binding bind(const AccessTrace& trace, const CompatibilityGraph& graph,
             const ExplorationParams& params);

/// Merges same-kind FIFO/LIFO structures whose activity windows are
/// strictly disjoint, to a fixpoint.
Binding merge(const Binding& binding, const AccessTrace& trace,
              const ExplorationParams& params = {});

/// Exhaustive minimum-memory binding over all set partitions. Test oracle;
/// refuses n > 12 with Error(TooLarge).
Binding oracle_bind(const AccessTrace& trace, const CompatibilityGraph& graph,
                    const ExplorationParams& params);

std::uint64_t memory_points(const Binding& binding);
std::uint64_t structures_to_control(const Binding& binding, std::size_t mux_count);

/// One line per structure:
/// "id kind depth peak traffic src=<ports> dst=<ports> data=<ids>".
void write_binding(const Binding& binding, std::ostream& out);

}  // namespace star
