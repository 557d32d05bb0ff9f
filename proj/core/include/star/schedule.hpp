#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "star/permutation.hpp"

namespace star {

using Cycle = std::int64_t;
using PortId = std::uint32_t;

struct ScheduleConfig {
  std::uint32_t p_in = 1;
  std::uint32_t p_out = 1;
  std::uint32_t word_bits = 8;
  double clock_ns = 10.0;
  /// Explicit first-read cycle; empty means the minimal causal offset.
  std::optional<Cycle> read_offset;

  void validate() const;
  bool operator==(const ScheduleConfig&) const = default;
};

struct AccessEvent {
  DatumId datum = 0;
  Cycle write_cycle = 0;
  PortId write_port = 0;
  Cycle read_cycle = 0;
  PortId read_port = 0;

  bool operator==(const AccessEvent&) const = default;
};

/// Timed, port-mapped access trace for one frame.
///
/// Within a cycle, reads happen before writes: a datum read at cycle t frees
/// its slot for a datum written at cycle t. Every datum is therefore stored
/// for at least one full cycle (read_cycle > write_cycle).
struct AccessTrace {
  ScheduleConfig config;
  /// events[d].datum == d; data are numbered in write order.
  std::vector<AccessEvent> events;
  Cycle first_read = 0;
  Cycle total_cycles = 0;

  std::size_t size() const noexcept { return events.size(); }
  const AccessEvent& operator[](DatumId d) const { return events.at(d); }

  /// Read-order list of data, i.e. the permutation the trace realises.
  std::vector<DatumId> read_order() const;

  bool operator==(const AccessTrace&) const = default;
};

/// Smallest first-read cycle that keeps every datum causal (>= 1).
Cycle minimal_read_offset(const Permutation& perm, std::uint32_t p_in, std::uint32_t p_out);

AccessTrace build_trace(const Permutation& perm, const ScheduleConfig& cfg);

/// Checks slot uniqueness, causality and the round-robin schedule shape.
/// Throws Error(Collision | Causality | Validation).
void validate_trace(const AccessTrace& trace);

void write_trace(const AccessTrace& trace, std::ostream& out);
void write_trace(const AccessTrace& trace, const std::filesystem::path& path);
AccessTrace read_trace(std::istream& in);
AccessTrace read_trace(const std::filesystem::path& path);

/// Frame bits over frame time, in Mb/s.
double throughput_mbps(const AccessTrace& trace);

}  // namespace star
