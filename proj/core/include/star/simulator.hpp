#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "star/binder.hpp"
#include "star/schedule.hpp"

namespace star {

enum class ViolationKind { WrongDatum, Overflow, Underflow, DoubleAccess };

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  Cycle cycle = 0;
  std::uint32_t structure = 0;
  /// Datum the schedule demands (reads) or offers (writes).
  DatumId expected = 0;
  /// Datum actually delivered on a wrong-datum read.
  std::optional<DatumId> observed;

  std::string describe() const;
  bool operator==(const Violation&) const = default;
};

struct OutputRecord {
  Cycle cycle = 0;
  PortId port = 0;
  std::optional<DatumId> datum;  ///< empty on underflow

  bool operator==(const OutputRecord&) const = default;
};

struct StructureStats {
  std::uint32_t observed_peak = 0;
  std::uint32_t observed_traffic = 0;

  bool operator==(const StructureStats&) const = default;
};

struct SimReport {
  bool ok = false;
  Cycle cycles = 0;
  std::vector<StructureStats> structures;
  std::vector<OutputRecord> outputs;
  std::vector<Violation> violations;
};

/// Cycle-accurate replay of a bound architecture. Each cycle first performs
/// every scheduled read (FIFO pops its head, LIFO its top, a register
/// returns its value), checking the delivered datum, then every scheduled
/// write. Violations are collected; the replay never stops early.
SimReport simulate(const AccessTrace& trace, const Binding& binding);

struct LatencyInfo {
  Cycle max_latency = 0;
  Cycle first_read = 0;
};

/// Longest storage time over all data and the first-read cycle.
LatencyInfo latency(const AccessTrace& trace);

/// "cycle <t> port <p> -> datum <id>" lines.
void write_output_log(const SimReport& report, std::ostream& out);

}  // namespace star
