// star: command-line front end for the STAR adapter flow.
//
//   trace     permutation + schedule -> trace file
//   build     trace -> binding + netlist
//   simulate  trace + netlist -> replay report (exit 0 iff the replay is clean)
//   emit      trace + netlist -> VHDL + test vectors
//   sweep     trace + parameter grid -> report CSV
//   compare   permutation over several parallelisms -> comparison CSV + SVG
//
// Exit codes: 0 ok, 1 I/O or internal error, 2 usage/parse error,
// 3 validation error, 4 infeasible binding, 5 simulation failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "star/binder.hpp"
#include "star/emitter.hpp"
#include "star/error.hpp"
#include "star/explorer.hpp"
#include "star/permutation.hpp"
#include "star/rcg.hpp"
#include "star/schedule.hpp"
#include "star/simulator.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kUsage = 2,
  kValidation = 3,
  kInfeasible = 4,
  kSimFailure = 5,
};

int exit_code_for(star::ErrorKind kind) {
  using star::ErrorKind;
  switch (kind) {
    case ErrorKind::Parse: return kUsage;
    case ErrorKind::Infeasible: return kInfeasible;
    case ErrorKind::Io:
    case ErrorKind::Internal: return kIoError;
    default: return kValidation;
  }
}

struct Options {
  std::string gen;
  std::string table;
  std::string trace;
  std::string netlist;
  std::string grid;
  std::string out = ".";
  star::ScheduleConfig schedule;
  std::optional<star::Cycle> read_offset;
  star::ExplorationParams params;
  bool no_fifo = false;
  bool no_lifo = false;
  bool no_reg = false;
  std::vector<std::uint32_t> p_list{1, 2, 3, 5, 6};
};

star::ExplorationParams params_of(const Options& o) {
  auto p = o.params;
  p.enable_fifo = !o.no_fifo;
  p.enable_lifo = !o.no_lifo;
  p.enable_reg = !o.no_reg;
  p.validate();
  return p;
}

star::ScheduleConfig schedule_of(const Options& o) {
  auto s = o.schedule;
  s.read_offset = o.read_offset;
  s.validate();
  return s;
}

star::Permutation permutation_of(const Options& o) {
  if (!o.table.empty()) return star::load_table(o.table);
  if (!o.gen.empty()) return star::from_generator_spec(o.gen, o.params.seed);
  throw star::Error(star::ErrorKind::Parse, "a permutation source is required: --gen or --table");
}

star::AccessTrace trace_of(const Options& o) {
  if (!o.trace.empty()) return star::read_trace(o.trace);
  return star::build_trace(permutation_of(o), schedule_of(o));
}

fs::path output_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw star::Error(star::ErrorKind::Io, "cannot write " + path.string());
  fn(out);
}

int cmd_trace(const Options& o) {
  const auto trace = trace_of(o);
  const auto dir = output_dir(o);
  star::write_trace(trace, dir / "trace.txt");
  const auto lat = star::latency(trace);
  std::cout << "n=" << trace.size() << " first_read=" << trace.first_read
            << " total_cycles=" << trace.total_cycles << " max_latency=" << lat.max_latency
            << " throughput_mbps=" << star::throughput_mbps(trace) << '\n';
  return kOk;
}

int cmd_build(const Options& o) {
  const auto trace = trace_of(o);
  const auto design = star::synthesize(trace, params_of(o));
  const auto dir = output_dir(o);
  star::write_trace(trace, dir / "trace.txt");
  write_file(dir / "binding.txt", [&](std::ostream& os) { star::write_binding(design.binding, os); });
  star::emit_netlist(design.arch, dir / "netlist.txt");
  std::cout << "structures=" << design.binding.structures.size()
            << " muxes=" << design.arch.mux_count()
            << " memory_points=" << star::memory_points(design.binding)
            << " structures_to_control=" << star::structures_to_control(design.binding, design.arch)
            << " sim_ok=" << (design.report.ok ? "true" : "false") << '\n';
  return design.report.ok ? kOk : kSimFailure;
}

void require_trace_and_netlist(const Options& o) {
  if (o.trace.empty() || o.netlist.empty()) {
    throw star::Error(star::ErrorKind::Parse, "--trace and --netlist are required");
  }
}

int cmd_simulate(const Options& o) {
  require_trace_and_netlist(o);
  const auto trace = star::read_trace(o.trace);
  const auto arch = star::load_netlist(o.netlist);
  const auto report = star::simulate(trace, arch);
  const auto dir = output_dir(o);
  write_file(dir / "sim_log.txt", [&](std::ostream& os) { star::write_output_log(report, os); });
  for (const auto& v : report.violations) std::cout << "violation: " << v.describe() << '\n';
  std::cout << "cycles=" << report.cycles << " violations=" << report.violations.size()
            << " ok=" << (report.ok ? "true" : "false") << '\n';
  return report.ok ? kOk : kSimFailure;
}

int cmd_emit(const Options& o) {
  require_trace_and_netlist(o);
  const auto trace = star::read_trace(o.trace);
  const auto arch = star::load_netlist(o.netlist);
  if (arch.n != trace.size() || arch.total_cycles != trace.total_cycles) {
    throw star::Error(star::ErrorKind::Validation, "netlist and trace describe different frames");
  }
  const auto dir = output_dir(o);
  star::emit_hdl(arch, dir / "star.vhd");
  star::emit_vectors(trace, dir / "vectors.csv");
  std::cout << "wrote " << (dir / "star.vhd").string() << " and "
            << (dir / "vectors.csv").string() << '\n';
  return kOk;
}

int cmd_sweep(const Options& o) {
  const auto trace = trace_of(o);
  const auto base = params_of(o);
  const auto grid = o.grid.empty() ? std::vector<star::ExplorationParams>{base}
                                   : star::load_grid(o.grid, base);
  const auto entries = star::sweep(trace, grid);
  const auto dir = output_dir(o);
  write_file(dir / "sweep.csv", [&](std::ostream& os) { star::write_sweep_csv(entries, os); });
  std::size_t errors = 0;
  for (const auto& e : entries) errors += std::holds_alternative<star::SweepError>(e);
  std::cout << "points=" << entries.size() << " errors=" << errors << '\n';
  return kOk;
}

int cmd_compare(const Options& o) {
  const auto perm = permutation_of(o);
  const auto rows = star::compare_parallelism(perm, schedule_of(o), params_of(o), o.p_list);
  const auto dir = output_dir(o);
  write_file(dir / "compare.csv", [&](std::ostream& os) { star::write_comparison_csv(rows, os); });
  write_file(dir / "compare_trends.csv",
             [&](std::ostream& os) { star::write_trend_report(rows, os); });
  write_file(dir / "memory.svg", [&](std::ostream& os) { os << star::memory_chart(rows); });
  write_file(dir / "control.svg", [&](std::ostream& os) { os << star::control_chart(rows); });
  star::write_trend_report(rows, std::cout);
  for (const auto& r : rows) {
    if (!r.sim_ok) return kSimFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAR space-time adapter synthesis and exploration"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file mirroring the flags; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Options o;
  auto* gen = app.add_option("--gen", o.gen,
                             "permutation generator: identity:N, block:RxC, reverse:N, random:N");
  auto* table = app.add_option("--table", o.table, "permutation table file")
                    ->check(CLI::ExistingFile);
  gen->excludes(table);
  auto* trace_opt =
      app.add_option("--trace", o.trace, "trace file (replaces --gen/--table)")->check(CLI::ExistingFile);
  trace_opt->excludes(gen)->excludes(table);
  app.add_option("--netlist", o.netlist, "netlist file")->check(CLI::ExistingFile);
  app.add_option("--grid", o.grid, "sweep grid file (key=v1,v2,... lines)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory")->capture_default_str();

  app.add_option("--p-in", o.schedule.p_in, "input parallelism")->capture_default_str();
  app.add_option("--p-out", o.schedule.p_out, "output parallelism")->capture_default_str();
  app.add_option("--word-bits", o.schedule.word_bits, "data width")->capture_default_str();
  app.add_option("--clock-ns", o.schedule.clock_ns, "clock period")->capture_default_str();
  app.add_option("--read-offset", o.read_offset, "explicit first-read cycle");
  app.add_option("--p-list", o.p_list, "parallelism values for compare")
      ->delimiter(',')
      ->capture_default_str();

  auto& p = o.params;
  app.add_option("--min-size", p.min_size, "minimum data per FIFO/LIFO")->capture_default_str();
  app.add_option("--max-size", p.max_size, "maximum data per FIFO/LIFO")->capture_default_str();
  app.add_option("--min-use", p.min_use_factor, "minimum traffic/depth")->capture_default_str();
  app.add_option("--min-fill", p.min_fill_pct, "minimum peak/depth percentage")
      ->capture_default_str();
  app.add_flag("--mux-factor", p.mux_factor_on, "one source port per structure");
  app.add_flag("--no-fifo", o.no_fifo, "disable FIFO binding");
  app.add_flag("--no-lifo", o.no_lifo, "disable LIFO binding");
  app.add_flag("--no-reg", o.no_reg, "disable registers");
  app.add_option("--w-size", p.w_size, "weight of structure size")->capture_default_str();
  app.add_option("--w-use", p.w_use, "weight of use factor")->capture_default_str();
  app.add_option("--w-fill", p.w_fill, "weight of fill factor")->capture_default_str();
  app.add_option("--w-mux", p.w_mux, "penalty per output port fed")->capture_default_str();
  app.add_option("--seed", p.seed, "seed for random:N laws")->capture_default_str();

  int (*handler)(const Options&) = nullptr;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    auto* s = app.add_subcommand(name, help)->fallthrough();
    s->callback([&handler, fn] { handler = fn; });
    return s;
  };
  sub("trace", "generate the access trace", cmd_trace);
  sub("build", "bind, merge and write binding + netlist", cmd_build);
  sub("simulate", "replay a netlist against its trace", cmd_simulate);
  sub("emit", "write VHDL and test vectors", cmd_emit);
  sub("sweep", "run a parameter grid", cmd_sweep);
  sub("compare", "compare against RAM and register references", cmd_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return handler(o);
  } catch (const star::Error& e) {
    std::cerr << "error (" << star::to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}
