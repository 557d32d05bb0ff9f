#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "star/binder.hpp"
#include "star/schedule.hpp"
#include "star/simulator.hpp"

namespace star {

struct PushOp {
  std::uint32_t structure = 0;
  PortId in_port = 0;
  bool operator==(const PushOp&) const = default;
};

struct PopOp {
  std::uint32_t structure = 0;
  PortId out_port = 0;
  bool operator==(const PopOp&) const = default;
};

/// Select value of the multiplexer in front of an output port; index is a
/// position in Architecture::output_feeds[port].
struct MuxSelect {
  PortId out_port = 0;
  std::uint32_t index = 0;
  bool operator==(const MuxSelect&) const = default;
};

/// One row of the controller's cycle-indexed table.
struct ControlStep {
  std::vector<PushOp> pushes;
  std::vector<PopOp> pops;
  std::vector<MuxSelect> selects;
  bool operator==(const ControlStep&) const = default;
};

/// Datapath plus controller: storage elements, the input dispatch and output
/// multiplexer fabric, and a control table with one step per cycle.
struct Architecture {
  std::size_t n = 0;
  std::uint32_t p_in = 1;
  std::uint32_t p_out = 1;
  std::uint32_t word_bits = 8;
  Cycle total_cycles = 0;
  std::vector<StorageStructure> structures;
  /// Per input port, the structures it can push into.
  std::vector<std::vector<std::uint32_t>> input_routes;
  /// Per output port, the structures feeding it.
  std::vector<std::vector<std::uint32_t>> output_feeds;
  std::vector<ControlStep> control;

  /// Output ports needing a counted mux. Registers feeding one port form a
  /// single register-bank input, so a port fed only by registers needs none.
  std::size_t mux_count() const;
  Binding binding() const;
  /// Throws Error(Validation) on any broken routing or control invariant.
  void validate() const;

  bool operator==(const Architecture&) const = default;
};

Architecture elaborate(const AccessTrace& trace, const Binding& binding);

std::uint64_t structures_to_control(const Binding& binding, const Architecture& arch);

/// Replays the trace against the architecture's storage elements.
SimReport simulate(const AccessTrace& trace, const Architecture& arch);

void emit_netlist(const Architecture& arch, std::ostream& out);
void emit_netlist(const Architecture& arch, const std::filesystem::path& path);
Architecture load_netlist(std::istream& in);
Architecture load_netlist(const std::filesystem::path& path);

/// Synthesizable VHDL: star_fifo, star_lifo, star_reg templates, the
/// star_ctrl table-driven controller and the star_top wiring.
void emit_hdl(const Architecture& arch, std::ostream& out);
void emit_hdl(const Architecture& arch, const std::filesystem::path& path);

/// CSV "cycle,port_kind,port_index,datum" with the expected port traffic of
/// every cycle.
void emit_vectors(const AccessTrace& trace, std::ostream& out);
void emit_vectors(const AccessTrace& trace, const std::filesystem::path& path);

}  // namespace star
