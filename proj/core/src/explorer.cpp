#include "star/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "star/error.hpp"
#include "star/rcg.hpp"
#include "star/svg.hpp"

namespace star {

namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::Parse, "bad boolean '" + v + "'");
}

template <typename T>
T parse_value(const std::string& v) {
  T value{};
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), last, value);
  if (v.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::Parse, "bad grid value '" + v + "'");
  }
  return value;
}

void apply(ExplorationParams& p, const std::string& key, const std::string& v) {
  if (key == "fifo") {
    p.enable_fifo = parse_bool(v);
  } else if (key == "lifo") {
    p.enable_lifo = parse_bool(v);
  } else if (key == "reg") {
    p.enable_reg = parse_bool(v);
  } else if (key == "min_size") {
    p.min_size = parse_value<std::uint32_t>(v);
  } else if (key == "max_size") {
    p.max_size = parse_value<std::uint32_t>(v);
  } else if (key == "min_use") {
    p.min_use_factor = parse_value<double>(v);
  } else if (key == "min_fill") {
    p.min_fill_pct = parse_value<double>(v);
  } else if (key == "mux_factor") {
    p.mux_factor_on = parse_bool(v);
  } else if (key == "w_size") {
    p.w_size = parse_value<double>(v);
  } else if (key == "w_use") {
    p.w_use = parse_value<double>(v);
  } else if (key == "w_fill") {
    p.w_fill = parse_value<double>(v);
  } else if (key == "w_mux") {
    p.w_mux = parse_value<double>(v);
  } else {
    throw Error(ErrorKind::Parse, "unknown grid key '" + key + "'");
  }
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

ReferenceCosts ram_reference(std::size_t n, std::uint32_t p_in) {
  if (p_in < 1) throw Error(ErrorKind::InvalidParams, "p_in must be >= 1");
  const std::uint64_t per_bank = (n + p_in - 1) / p_in;
  return {static_cast<std::uint64_t>(p_in) * (per_bank == 0 ? 0 : pow2ceil(per_bank)),
          static_cast<std::uint64_t>(p_in) + static_cast<std::uint64_t>(p_in) * p_in};
}

ReferenceCosts reg_reference(std::size_t n) { return {n, n}; }

Design synthesize(const AccessTrace& trace, const ExplorationParams& params) {
  Design d;
  d.trace = trace;
  const auto graph = build_graph(trace);
  d.binding = merge(bind(trace, graph, params), trace, params);
  d.arch = elaborate(trace, d.binding);
  d.report = simulate(trace, d.binding);
  return d;
}

std::vector<SweepEntry> sweep(const AccessTrace& trace,
                              const std::vector<ExplorationParams>& grid, unsigned threads) {
  if (grid.empty()) throw Error(ErrorKind::InvalidParams, "sweep grid is empty");
  std::vector<SweepEntry> out(grid.size(), SweepError{});
  const double throughput = throughput_mbps(trace);
  const auto graph = build_graph(trace);

  auto run = [&](std::size_t i) {
    const auto& params = grid[i];
    try {
      const auto binding = merge(bind(trace, graph, params), trace, params);
      const auto arch = elaborate(trace, binding);
      const auto report = simulate(trace, binding);
      if (!report.ok) {
        out[i] = SweepError{params, "simulation reported " +
                                        std::to_string(report.violations.size()) +
                                        " violations"};
        return;
      }
      SweepRow row;
      row.params = params;
      for (const auto& s : binding.structures) {
        switch (s.kind) {
          case StorageKind::Fifo: ++row.fifo; break;
          case StorageKind::Lifo: ++row.lifo; break;
          case StorageKind::Reg: ++row.reg; break;
        }
      }
      row.mux = arch.mux_count();
      row.total = row.fifo + row.lifo + row.reg + row.mux;
      row.memory_points = memory_points(binding);
      row.throughput_mbps = throughput;
      row.sim_ok = true;
      out[i] = row;
    } catch (const Error& e) {
      out[i] = SweepError{params, e.what()};
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) run(i);
    });
  }
  workers.clear();
  return out;
}

std::vector<SweepEntry> sweep(const Permutation& perm, const ScheduleConfig& cfg,
                              const std::vector<ExplorationParams>& grid, unsigned threads) {
  return sweep(build_trace(perm, cfg), grid, threads);
}

std::vector<ExplorationParams> parse_grid(std::istream& in, const ExplorationParams& base) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == line.size()) {
      throw Error(ErrorKind::Parse, "grid line " + std::to_string(line_no) +
                                        ": expected key=v1,v2,...");
    }
    const auto key = line.substr(0, eq);
    if (std::any_of(axes.begin(), axes.end(), [&](const auto& a) { return a.first == key; })) {
      throw Error(ErrorKind::Parse,
                  "grid line " + std::to_string(line_no) + ": key '" + key + "' repeated");
    }
    std::vector<std::string> values;
    std::istringstream vs(line.substr(eq + 1));
    for (std::string v; std::getline(vs, v, ',');) values.push_back(v);
    axes.emplace_back(key, std::move(values));
  }

  std::vector<ExplorationParams> grid{base};
  for (const auto& [key, values] : axes) {
    std::vector<ExplorationParams> next;
    for (const auto& p : grid) {
      for (const auto& v : values) {
        ExplorationParams q = p;
        apply(q, key, v);
        next.push_back(q);
      }
    }
    grid = std::move(next);
  }
  return grid;
}

std::vector<ExplorationParams> load_grid(const std::filesystem::path& path,
                                         const ExplorationParams& base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open grid " + path.string());
  return parse_grid(in, base);
}

void write_sweep_csv(const std::vector<SweepEntry>& entries, std::ostream& out) {
  out << "config,fifo,lifo,reg,mux,total,memory_points,throughput_mbps,sim_ok\n";
  for (const auto& entry : entries) {
    if (const auto* row = std::get_if<SweepRow>(&entry)) {
      out << row->params.summary() << ',' << row->fifo << ',' << row->lifo << ',' << row->reg
          << ',' << row->mux << ',' << row->total << ',' << row->memory_points << ','
          << fixed3(row->throughput_mbps) << ',' << (row->sim_ok ? "true" : "false") << '\n';
    } else {
      const auto& err = std::get<SweepError>(entry);
      std::string msg = err.message;
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << "# error " << err.params.summary() << ": " << msg << '\n';
    }
  }
}

std::vector<ComparisonRow> compare_parallelism(const Permutation& perm, const ScheduleConfig& cfg,
                                               const ExplorationParams& params,
                                               const std::vector<std::uint32_t>& p_list) {
  std::vector<ComparisonRow> rows;
  for (std::uint32_t p : p_list) {
    ScheduleConfig c = cfg;
    c.p_in = p;
    c.p_out = p;
    c.read_offset.reset();
    const auto design = synthesize(build_trace(perm, c), params);
    ComparisonRow row;
    row.p = p;
    row.star_mem = memory_points(design.binding);
    row.star_ctrl = structures_to_control(design.binding, design.arch);
    const auto ram = ram_reference(perm.size(), p);
    const auto reg = reg_reference(perm.size());
    row.ram_mem = ram.memory_points;
    row.ram_ctrl = ram.structures_to_control;
    row.reg_mem = reg.memory_points;
    row.reg_ctrl = reg.structures_to_control;
    row.sim_ok = design.report.ok;
    rows.push_back(row);
  }
  return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << "p,star_mem,ram_mem,reg_mem,star_ctrl,ram_ctrl,reg_ctrl\n";
  for (const auto& r : rows) {
    out << r.p << ',' << r.star_mem << ',' << r.ram_mem << ',' << r.reg_mem << ','
        << r.star_ctrl << ',' << r.ram_ctrl << ',' << r.reg_ctrl << '\n';
  }
}

void write_trend_report(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << "p,star_mem,ram_mem,mem_trend,star_ctrl,reg_ctrl,ctrl_trend,sim_ok\n";
  for (const auto& r : rows) {
    out << r.p << ',' << r.star_mem << ',' << r.ram_mem << ','
        << (r.star_below_ram() ? "pass" : "flag") << ',' << r.star_ctrl << ',' << r.reg_ctrl
        << ',' << (r.star_simpler_than_reg() ? "pass" : "flag") << ','
        << (r.sim_ok ? "true" : "false") << '\n';
  }
}

std::string memory_chart(const std::vector<ComparisonRow>& rows) {
  std::vector<PlotSeries> s{{"RAM", {}}, {"registers", {}}, {"STAR", {}}};
  for (const auto& r : rows) {
    s[0].points.emplace_back(r.p, static_cast<double>(r.ram_mem));
    s[1].points.emplace_back(r.p, static_cast<double>(r.reg_mem));
    s[2].points.emplace_back(r.p, static_cast<double>(r.star_mem));
  }
  return render_line_chart("Memory points versus I/O parallelism", "parallelism",
                           "memory points", s);
}

std::string control_chart(const std::vector<ComparisonRow>& rows) {
  std::vector<PlotSeries> s{{"RAM", {}}, {"registers", {}}, {"STAR", {}}};
  for (const auto& r : rows) {
    s[0].points.emplace_back(r.p, static_cast<double>(r.ram_ctrl));
    s[1].points.emplace_back(r.p, static_cast<double>(r.reg_ctrl));
    s[2].points.emplace_back(r.p, static_cast<double>(r.star_ctrl));
  }
  return render_line_chart("Structures to control versus I/O parallelism", "parallelism",
                           "structures", s);
}

}  // namespace star
