#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "star/binder.hpp"
#include "star/emitter.hpp"
#include "star/permutation.hpp"
#include "star/schedule.hpp"
#include "star/simulator.hpp"

namespace star {

struct ReferenceCosts {
  std::uint64_t memory_points = 0;
  std::uint64_t structures_to_control = 0;

  bool operator==(const ReferenceCosts&) const = default;
};

/// One RAM bank per input port, each rounded up to a power-of-two capacity,
/// behind a p_in x p_in crossbar of 2x2 switches.
ReferenceCosts ram_reference(std::size_t n, std::uint32_t p_in);

/// One register per datum, no reuse.
ReferenceCosts reg_reference(std::size_t n);

/// Full pipeline output for one parameter point.
struct Design {
  AccessTrace trace;
  Binding binding;
  Architecture arch;
  SimReport report;
};

/// trace -> graph -> bind -> merge -> elaborate -> simulate.
Design synthesize(const AccessTrace& trace, const ExplorationParams& params);

struct SweepRow {
  ExplorationParams params;
  std::size_t fifo = 0;
  std::size_t lifo = 0;
  std::size_t reg = 0;
  std::size_t mux = 0;
  std::size_t total = 0;
  std::uint64_t memory_points = 0;
  double throughput_mbps = 0;
  bool sim_ok = false;
};

struct SweepError {
  ExplorationParams params;
  std::string message;
};

using SweepEntry = std::variant<SweepRow, SweepError>;

/// Runs every grid point on the same trace. Points run on up to `threads`
/// workers (0 = hardware concurrency); results stay in grid order. A point
/// that throws or fails simulation becomes a SweepError.
std::vector<SweepEntry> sweep(const AccessTrace& trace,
                              const std::vector<ExplorationParams>& grid, unsigned threads = 0);
std::vector<SweepEntry> sweep(const Permutation& perm, const ScheduleConfig& cfg,
                              const std::vector<ExplorationParams>& grid, unsigned threads = 0);

/// Grid file: one "key=v1,v2,..." line per swept parameter; the grid is the
/// cartesian product with the first key outermost. Unlisted keys keep the
/// base values. Keys: fifo lifo reg min_size max_size min_use min_fill
/// mux_factor w_size w_use w_fill w_mux.
std::vector<ExplorationParams> parse_grid(std::istream& in, const ExplorationParams& base);
std::vector<ExplorationParams> load_grid(const std::filesystem::path& path,
                                         const ExplorationParams& base);

/// "config,fifo,lifo,reg,mux,total,memory_points,throughput_mbps,sim_ok";
/// error records become '#' comment lines.
void write_sweep_csv(const std::vector<SweepEntry>& entries, std::ostream& out);

struct ComparisonRow {
  std::uint32_t p = 0;
  std::uint64_t star_mem = 0;
  std::uint64_t ram_mem = 0;
  std::uint64_t reg_mem = 0;
  std::uint64_t star_ctrl = 0;
  std::uint64_t ram_ctrl = 0;
  std::uint64_t reg_ctrl = 0;
  bool sim_ok = false;

  bool star_below_ram() const { return star_mem <= ram_mem; }
  bool star_simpler_than_reg() const { return star_ctrl <= reg_ctrl; }
};

/// STAR against the RAM and register references for each p (p_in = p_out = p).
std::vector<ComparisonRow> compare_parallelism(const Permutation& perm, const ScheduleConfig& cfg,
                                               const ExplorationParams& params,
                                               const std::vector<std::uint32_t>& p_list);

/// "p,star_mem,ram_mem,reg_mem,star_ctrl,ram_ctrl,reg_ctrl".
void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);

/// "p,star_mem,ram_mem,mem_trend,star_ctrl,reg_ctrl,ctrl_trend" with
/// pass/flag markers for the expected memory and complexity trends.
void write_trend_report(const std::vector<ComparisonRow>& rows, std::ostream& out);

/// Memory points and structures-to-control versus parallelism.
std::string memory_chart(const std::vector<ComparisonRow>& rows);
std::string control_chart(const std::vector<ComparisonRow>& rows);

}  // namespace star
