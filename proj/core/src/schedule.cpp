#include "star/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "star/error.hpp"

namespace star {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, const char* field) {
  T value{};
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad " + field +
                                      " '" + text + "'");
  }
  return value;
}

std::string slot_name(Cycle c, PortId p) {
  return "(cycle " + std::to_string(c) + ", port " + std::to_string(p) + ")";
}

}  // namespace

void ScheduleConfig::validate() const {
  if (p_in < 1 || p_out < 1) {
    throw Error(ErrorKind::InvalidParams, "parallelism must be >= 1");
  }
  if (word_bits < 1) throw Error(ErrorKind::InvalidParams, "word_bits must be >= 1");
  if (!(clock_ns > 0.0)) throw Error(ErrorKind::InvalidParams, "clock_ns must be > 0");
}

std::vector<DatumId> AccessTrace::read_order() const {
  std::vector<DatumId> order(events.size());
  for (std::size_t d = 0; d < events.size(); ++d) order[d] = static_cast<DatumId>(d);
  std::sort(order.begin(), order.end(), [this](DatumId a, DatumId b) {
    const auto& ea = events[a];
    const auto& eb = events[b];
    return std::pair(ea.read_cycle, ea.read_port) < std::pair(eb.read_cycle, eb.read_port);
  });
  return order;
}

Cycle minimal_read_offset(const Permutation& perm, std::uint32_t p_in, std::uint32_t p_out) {
  Cycle worst = 0;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    const Cycle write_cycle = static_cast<Cycle>(perm[j] / p_in);
    worst = std::max(worst, write_cycle - static_cast<Cycle>(j / p_out));
  }
  return std::max<Cycle>(worst + 1, 1);
}

AccessTrace build_trace(const Permutation& perm, const ScheduleConfig& cfg) {
  cfg.validate();
  const std::size_t n = perm.size();
  const Cycle minimal = minimal_read_offset(perm, cfg.p_in, cfg.p_out);
  Cycle r0 = minimal;
  if (cfg.read_offset) {
    r0 = *cfg.read_offset;
    if (r0 < minimal) {
      for (std::size_t j = 0; j < n; ++j) {
        const Cycle wc = static_cast<Cycle>(perm[j] / cfg.p_in);
        const Cycle rc = r0 + static_cast<Cycle>(j / cfg.p_out);
        if (rc <= wc) {
          throw Error(ErrorKind::Causality,
                      "read offset " + std::to_string(r0) + " reads datum " +
                          std::to_string(perm[j]) + " at cycle " + std::to_string(rc) +
                          " but it is written at cycle " + std::to_string(wc) +
                          " (minimum offset " + std::to_string(minimal) + ")");
        }
      }
    }
  }

  AccessTrace trace;
  trace.config = cfg;
  trace.events.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& e = trace.events[k];
    e.datum = static_cast<DatumId>(k);
    e.write_cycle = static_cast<Cycle>(k / cfg.p_in);
    e.write_port = static_cast<PortId>(k % cfg.p_in);
  }
  for (std::size_t j = 0; j < n; ++j) {
    auto& e = trace.events[perm[j]];
    e.read_cycle = r0 + static_cast<Cycle>(j / cfg.p_out);
    e.read_port = static_cast<PortId>(j % cfg.p_out);
  }
  trace.first_read = r0;
  trace.total_cycles = r0 + static_cast<Cycle>((n - 1) / cfg.p_out) + 1;
  return trace;
}

void validate_trace(const AccessTrace& trace) {
  trace.config.validate();
  const auto& cfg = trace.config;
  const std::size_t n = trace.events.size();
  if (n == 0) throw Error(ErrorKind::InvalidSize, "trace holds no data");

  std::set<std::pair<Cycle, PortId>> writes;
  std::set<std::pair<Cycle, PortId>> reads;
  for (std::size_t d = 0; d < n; ++d) {
    const auto& e = trace.events[d];
    if (e.datum != d) {
      throw Error(ErrorKind::Validation, "event " + std::to_string(d) + " carries datum id " +
                                             std::to_string(e.datum));
    }
    if (e.write_port >= cfg.p_in || e.read_port >= cfg.p_out) {
      throw Error(ErrorKind::Validation, "datum " + std::to_string(d) + " uses a port outside " +
                                             "the configured parallelism");
    }
    if (e.write_cycle < 0) {
      throw Error(ErrorKind::Validation, "datum " + std::to_string(d) + " has a negative cycle");
    }
    if (!writes.emplace(e.write_cycle, e.write_port).second) {
      throw Error(ErrorKind::Collision, "two writes share slot " +
                                            slot_name(e.write_cycle, e.write_port) +
                                            " (datum " + std::to_string(d) + ")");
    }
    if (!reads.emplace(e.read_cycle, e.read_port).second) {
      throw Error(ErrorKind::Collision, "two reads share slot " +
                                            slot_name(e.read_cycle, e.read_port) + " (datum " +
                                            std::to_string(d) + ")");
    }
    if (e.read_cycle <= e.write_cycle) {
      throw Error(ErrorKind::Causality,
                  "datum " + std::to_string(d) + " is read at cycle " +
                      std::to_string(e.read_cycle) + " but written at cycle " +
                      std::to_string(e.write_cycle));
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = trace.events[k];
    if (e.write_cycle != static_cast<Cycle>(k / cfg.p_in) ||
        e.write_port != static_cast<PortId>(k % cfg.p_in)) {
      throw Error(ErrorKind::Validation, "datum " + std::to_string(k) +
                                             " is not on the round-robin write schedule");
    }
  }
  const auto order = trace.read_order();
  const Cycle r0 = trace.events[order.front()].read_cycle;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& e = trace.events[order[j]];
    if (e.read_cycle != r0 + static_cast<Cycle>(j / cfg.p_out) ||
        e.read_port != static_cast<PortId>(j % cfg.p_out)) {
      throw Error(ErrorKind::Validation, "datum " + std::to_string(e.datum) +
                                             " is not on the round-robin read schedule");
    }
  }
  if (cfg.read_offset && *cfg.read_offset != r0) {
    throw Error(ErrorKind::Validation, "declared read_offset does not match the earliest read");
  }
  if (trace.first_read != r0) {
    throw Error(ErrorKind::Validation, "first_read does not match the earliest read");
  }
  if (trace.total_cycles != trace.events[order.back()].read_cycle + 1) {
    throw Error(ErrorKind::Validation, "total_cycles does not match the last read");
  }
}

void write_trace(const AccessTrace& trace, std::ostream& out) {
  const auto& cfg = trace.config;
  out << "n=" << trace.size() << " p_in=" << cfg.p_in << " p_out=" << cfg.p_out
      << " word_bits=" << cfg.word_bits << " clock_ns=" << format_double(cfg.clock_ns);
  if (cfg.read_offset) out << " read_offset=" << *cfg.read_offset;
  out << '\n';
  for (const auto& e : trace.events) {
    out << e.datum << " w " << e.write_cycle << ' ' << e.write_port << " r " << e.read_cycle
        << ' ' << e.read_port << '\n';
  }
}

void write_trace(const AccessTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write trace " + path.string());
  write_trace(trace, out);
}

AccessTrace read_trace(std::istream& in) {
  AccessTrace trace;
  std::optional<std::size_t> n;
  std::vector<bool> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    for (std::string tok; tokens >> tok;) fields.push_back(tok);
    if (fields.empty()) continue;

    if (!n) {
      for (const auto& f : fields) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) {
          throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                            ": expected header key=value, got '" + f + "'");
        }
        const std::string key = f.substr(0, eq);
        const std::string value = f.substr(eq + 1);
        auto& cfg = trace.config;
        if (key == "n") {
          n = parse_number<std::size_t>(value, line_no, "n");
        } else if (key == "p_in") {
          cfg.p_in = parse_number<std::uint32_t>(value, line_no, "p_in");
        } else if (key == "p_out") {
          cfg.p_out = parse_number<std::uint32_t>(value, line_no, "p_out");
        } else if (key == "word_bits") {
          cfg.word_bits = parse_number<std::uint32_t>(value, line_no, "word_bits");
        } else if (key == "clock_ns") {
          cfg.clock_ns = parse_number<double>(value, line_no, "clock_ns");
        } else if (key == "read_offset") {
          cfg.read_offset = parse_number<Cycle>(value, line_no, "read_offset");
        } else {
          throw Error(ErrorKind::Parse,
                      "line " + std::to_string(line_no) + ": unknown header key '" + key + "'");
        }
      }
      if (!n) throw Error(ErrorKind::Parse, "trace header lacks n=<N>");
      trace.events.resize(*n);
      seen.assign(*n, false);
      continue;
    }

    if (fields.size() != 7 || fields[1] != "w" || fields[4] != "r") {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": expected '<id> w <cycle> <port> r <cycle> <port>'");
    }
    AccessEvent e;
    e.datum = parse_number<DatumId>(fields[0], line_no, "datum id");
    e.write_cycle = parse_number<Cycle>(fields[2], line_no, "write cycle");
    e.write_port = parse_number<PortId>(fields[3], line_no, "write port");
    e.read_cycle = parse_number<Cycle>(fields[5], line_no, "read cycle");
    e.read_port = parse_number<PortId>(fields[6], line_no, "read port");
    if (e.datum >= *n) {
      throw Error(ErrorKind::UnknownDatum, "line " + std::to_string(line_no) + ": datum " +
                                               std::to_string(e.datum) + " outside n");
    }
    if (seen[e.datum]) {
      throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ": datum " +
                                             std::to_string(e.datum) + " listed twice");
    }
    seen[e.datum] = true;
    trace.events[e.datum] = e;
  }
  if (!n) throw Error(ErrorKind::Parse, "empty trace file");
  for (std::size_t d = 0; d < *n; ++d) {
    if (!seen[d]) {
      throw Error(ErrorKind::Validation, "datum " + std::to_string(d) + " has no events");
    }
  }
  if (*n > 0) {
    Cycle first = trace.events[0].read_cycle;
    Cycle last = first;
    for (const auto& e : trace.events) {
      first = std::min(first, e.read_cycle);
      last = std::max(last, e.read_cycle);
    }
    trace.first_read = first;
    trace.total_cycles = last + 1;
  }
  validate_trace(trace);
  return trace;
}

AccessTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open trace " + path.string());
  return read_trace(in);
}

double throughput_mbps(const AccessTrace& trace) {
  const double bits = static_cast<double>(trace.size()) * trace.config.word_bits;
  const double frame_us = static_cast<double>(trace.total_cycles) * trace.config.clock_ns * 1e-3;
  return bits / frame_us;
}

}  // namespace star
