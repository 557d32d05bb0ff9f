#include "star/emitter.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "star/error.hpp"

namespace star {

namespace {

constexpr int kNetlistVersion = 1;

bool contains(const std::vector<PortId>& v, PortId p) {
  return std::binary_search(v.begin(), v.end(), p);
}

std::vector<std::vector<std::uint32_t>> routes(const std::vector<StorageStructure>& structures,
                                               std::uint32_t ports, bool sources) {
  std::vector<std::vector<std::uint32_t>> r(ports);
  for (const auto& s : structures) {
    for (PortId p : sources ? s.source_ports : s.sink_ports) {
      if (p < ports) r[p].push_back(s.id);
    }
  }
  return r;
}

Error invalid(const std::string& what) { return Error(ErrorKind::Validation, what); }

std::ofstream open_out(const std::filesystem::path& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, std::string("cannot write ") + what + " " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Netlist text

template <typename T>
std::string join(const std::vector<T>& v, char sep = ',') {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, comment-stripped line split into tokens; empty at EOF.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream is(line);
      std::vector<std::string> tokens;
      for (std::string t; is >> t;) tokens.push_back(t);
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  std::vector<std::string> expect(const std::string& keyword, std::size_t min_fields) {
    auto t = next();
    if (t.empty()) fail("unexpected end of file, expected '" + keyword + "'");
    if (t[0] != keyword) fail("expected '" + keyword + "', got '" + t[0] + "'");
    if (t.size() < min_fields) fail("'" + keyword + "' line has too few fields");
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, "netlist line " + std::to_string(line_no_) + ": " + what);
  }

  template <typename T>
  T number(const std::string& text, const char* field) const {
    T value{};
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc() || ptr != last) {
      fail(std::string("bad ") + field + " '" + text + "'");
    }
    return value;
  }

  template <typename T>
  std::vector<T> list(const std::string& text, const char* field) const {
    std::vector<T> out;
    if (text == "-") return out;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto end = comma == std::string::npos ? text.size() : comma;
      out.push_back(number<T>(text.substr(start, end - start), field));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  // "key=value" field with an expected key.
  std::string field(const std::string& token, const std::string& key) const {
    if (token.rfind(key + "=", 0) != 0) fail("expected field '" + key + "=' in '" + token + "'");
    return token.substr(key.size() + 1);
  }

  // "a@b" or "a:b" pairs separated by commas.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs(const std::string& text, char sep,
                                                             const char* what) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    if (text == "-") return out;
    std::size_t start = 0;
    for (;;) {
      const auto comma = text.find(',', start);
      const std::string item =
          text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const auto at = item.find(sep);
      if (at == std::string::npos) fail(std::string("malformed ") + what + " '" + item + "'");
      out.emplace_back(number<std::uint32_t>(item.substr(0, at), what),
                       number<std::uint32_t>(item.substr(at + 1), what));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

// ---------------------------------------------------------------------------
// HDL helpers

std::uint32_t select_bits(std::size_t choices) {
  std::uint32_t bits = 1;
  while ((std::size_t{1} << bits) < choices) ++bits;
  return bits;
}

std::string bit_string(std::uint64_t value, std::uint32_t width) {
  std::string s(width, '0');
  for (std::uint32_t i = 0; i < width; ++i) {
    if (value >> i & 1U) s[width - 1 - i] = '1';
  }
  return "\"" + s + "\"";
}

const char* kTemplates = R"(library ieee;
use ieee.std_logic_1164.all;
use ieee.numeric_std.all;

-- Queue. The head is presented combinationally; a push lands at the clock
-- edge, so a datum is readable from the cycle after its write.
entity star_fifo is
  generic (
    WIDTH : positive := 8;
    DEPTH : positive := 2
  );
  port (
    clk  : in  std_logic;
    rst  : in  std_logic;
    push : in  std_logic;
    pop  : in  std_logic;
    din  : in  std_logic_vector(WIDTH - 1 downto 0);
    dout : out std_logic_vector(WIDTH - 1 downto 0)
  );
end entity star_fifo;

architecture rtl of star_fifo is
  type mem_t is array (0 to DEPTH - 1) of std_logic_vector(WIDTH - 1 downto 0);
  signal mem  : mem_t;
  signal head : natural range 0 to DEPTH - 1 := 0;
  signal tail : natural range 0 to DEPTH - 1 := 0;
begin
  dout <= mem(head);

  process (clk)
  begin
    if rising_edge(clk) then
      if rst = '1' then
        head <= 0;
        tail <= 0;
      else
        if pop = '1' then
          head <= (head + 1) mod DEPTH;
        end if;
        if push = '1' then
          mem(tail) <= din;
          tail <= (tail + 1) mod DEPTH;
        end if;
      end if;
    end if;
  end process;
end architecture rtl;

library ieee;
use ieee.std_logic_1164.all;
use ieee.numeric_std.all;

-- Stack. A pop and a push in the same cycle replace the top element.
entity star_lifo is
  generic (
    WIDTH : positive := 8;
    DEPTH : positive := 2
  );
  port (
    clk  : in  std_logic;
    rst  : in  std_logic;
    push : in  std_logic;
    pop  : in  std_logic;
    din  : in  std_logic_vector(WIDTH - 1 downto 0);
    dout : out std_logic_vector(WIDTH - 1 downto 0)
  );
end entity star_lifo;

architecture rtl of star_lifo is
  type mem_t is array (0 to DEPTH - 1) of std_logic_vector(WIDTH - 1 downto 0);
  signal mem : mem_t;
  signal sp  : natural range 0 to DEPTH := 0;
begin
  dout <= mem(sp - 1) when sp > 0 else (others => '0');

  process (clk)
  begin
    if rising_edge(clk) then
      if rst = '1' then
        sp <= 0;
      elsif pop = '1' and push = '1' then
        mem(sp - 1) <= din;
      elsif pop = '1' then
        sp <= sp - 1;
      elsif push = '1' then
        mem(sp) <= din;
        sp <= sp + 1;
      end if;
    end if;
  end process;
end architecture rtl;

library ieee;
use ieee.std_logic_1164.all;

entity star_reg is
  generic (
    WIDTH : positive := 8
  );
  port (
    clk  : in  std_logic;
    rst  : in  std_logic;
    push : in  std_logic;
    pop  : in  std_logic;
    din  : in  std_logic_vector(WIDTH - 1 downto 0);
    dout : out std_logic_vector(WIDTH - 1 downto 0)
  );
end entity star_reg;

architecture rtl of star_reg is
  signal q : std_logic_vector(WIDTH - 1 downto 0) := (others => '0');
begin
  dout <= q;

  process (clk)
  begin
    if rising_edge(clk) then
      if push = '1' then
        q <= din;
      end if;
    end if;
  end process;
end architecture rtl;
)";

const char* entity_for(StorageKind kind) {
  switch (kind) {
    case StorageKind::Fifo: return "star_fifo";
    case StorageKind::Lifo: return "star_lifo";
    case StorageKind::Reg: return "star_reg";
  }
  return "star_reg";
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t Architecture::mux_count() const {
  std::size_t count = 0;
  for (const auto& feeds : output_feeds) {
    std::size_t inputs = 0;
    bool bank = false;
    for (std::uint32_t sid : feeds) {
      if (structures[sid].kind == StorageKind::Reg) {
        bank = true;
      } else {
        ++inputs;
      }
    }
    if (inputs + (bank ? 1 : 0) >= 2) ++count;
  }
  return count;
}

Binding Architecture::binding() const {
  Binding b;
  b.structures = structures;
  b.assignment.assign(n, 0);
  for (const auto& s : structures) {
    for (DatumId d : s.data) {
      if (d < n) b.assignment[d] = s.id;
    }
  }
  return b;
}

void Architecture::validate() const {
  if (p_in < 1 || p_out < 1) throw invalid("parallelism must be >= 1");
  if (word_bits < 1) throw invalid("word_bits must be >= 1");
  if (total_cycles < 1) throw invalid("total_cycles must be >= 1");
  binding().validate(n);
  for (const auto& s : structures) {
    if (s.kind != StorageKind::Reg && s.depth < 1) {
      throw invalid("structure " + std::to_string(s.id) + " has zero depth");
    }
    for (PortId p : s.source_ports) {
      if (p >= p_in) throw invalid("structure " + std::to_string(s.id) + " sources a bad port");
    }
    for (PortId p : s.sink_ports) {
      if (p >= p_out) throw invalid("structure " + std::to_string(s.id) + " sinks a bad port");
    }
  }
  if (input_routes != routes(structures, p_in, true)) {
    throw invalid("input routing disagrees with structure source ports");
  }
  if (output_feeds != routes(structures, p_out, false)) {
    throw invalid("output feeds disagree with structure sink ports");
  }
  if (control.size() != static_cast<std::size_t>(total_cycles)) {
    throw invalid("control table has " + std::to_string(control.size()) +
                  " steps, expected total_cycles=" + std::to_string(total_cycles));
  }
  std::vector<std::size_t> pushes(structures.size(), 0);
  std::vector<std::size_t> pops(structures.size(), 0);
  for (std::size_t t = 0; t < control.size(); ++t) {
    const auto& step = control[t];
    const std::string at = " at cycle " + std::to_string(t);
    std::set<std::uint32_t> pushed;
    std::set<PortId> in_used;
    for (const auto& op : step.pushes) {
      if (op.structure >= structures.size()) throw invalid("push to unknown structure" + at);
      if (!contains(structures[op.structure].source_ports, op.in_port)) {
        throw invalid("structure " + std::to_string(op.structure) + " pushed from port " +
                      std::to_string(op.in_port) + " outside its sources" + at);
      }
      if (!pushed.insert(op.structure).second) throw invalid("two pushes to one structure" + at);
      if (!in_used.insert(op.in_port).second) throw invalid("input port used twice" + at);
      ++pushes[op.structure];
    }
    std::map<PortId, std::uint32_t> routed;
    std::set<std::uint32_t> popped;
    for (const auto& op : step.pops) {
      if (op.structure >= structures.size()) throw invalid("pop from unknown structure" + at);
      if (!contains(structures[op.structure].sink_ports, op.out_port)) {
        throw invalid("structure " + std::to_string(op.structure) + " popped to port " +
                      std::to_string(op.out_port) + " outside its sinks" + at);
      }
      if (!routed.emplace(op.out_port, op.structure).second) {
        throw invalid("two pops routed to output port " + std::to_string(op.out_port) + at);
      }
      if (!popped.insert(op.structure).second) throw invalid("two pops from one structure" + at);
      ++pops[op.structure];
    }
    std::set<PortId> selected;
    for (const auto& sel : step.selects) {
      if (sel.out_port >= p_out || output_feeds[sel.out_port].size() < 2) {
        throw invalid("select for a port without a mux" + at);
      }
      const auto it = routed.find(sel.out_port);
      if (it == routed.end() || sel.index >= output_feeds[sel.out_port].size() ||
          output_feeds[sel.out_port][sel.index] != it->second) {
        throw invalid("mux select on port " + std::to_string(sel.out_port) +
                      " does not match the popped structure" + at);
      }
      selected.insert(sel.out_port);
    }
    for (const auto& [port, sid] : routed) {
      if (output_feeds[port].size() >= 2 && !selected.count(port)) {
        throw invalid("pop on muxed port " + std::to_string(port) + " lacks a select" + at);
      }
    }
  }
  for (const auto& s : structures) {
    if (pushes[s.id] != s.traffic || pops[s.id] != s.traffic) {
      throw invalid("structure " + std::to_string(s.id) +
                    " push/pop enables disagree with its traffic");
    }
  }
}

Architecture elaborate(const AccessTrace& trace, const Binding& binding) {
  binding.validate(trace.size());
  Architecture arch;
  arch.n = trace.size();
  arch.p_in = trace.config.p_in;
  arch.p_out = trace.config.p_out;
  arch.word_bits = trace.config.word_bits;
  arch.total_cycles = trace.total_cycles;
  arch.structures = binding.structures;
  arch.input_routes = routes(arch.structures, arch.p_in, true);
  arch.output_feeds = routes(arch.structures, arch.p_out, false);
  arch.control.resize(static_cast<std::size_t>(trace.total_cycles));

  for (const auto& e : trace.events) {
    const std::uint32_t sid = binding.assignment[e.datum];
    arch.control[static_cast<std::size_t>(e.write_cycle)].pushes.push_back({sid, e.write_port});
    auto& step = arch.control[static_cast<std::size_t>(e.read_cycle)];
    for (const auto& op : step.pops) {
      if (op.out_port == e.read_port) {
        throw Error(ErrorKind::Internal, "two pops routed to output port " +
                                             std::to_string(e.read_port) + " at cycle " +
                                             std::to_string(e.read_cycle));
      }
    }
    step.pops.push_back({sid, e.read_port});
    const auto& feeds = arch.output_feeds[e.read_port];
    if (feeds.size() >= 2) {
      const auto index = std::find(feeds.begin(), feeds.end(), sid) - feeds.begin();
      step.selects.push_back({e.read_port, static_cast<std::uint32_t>(index)});
    }
  }
  for (auto& step : arch.control) {
    std::sort(step.pushes.begin(), step.pushes.end(),
              [](const PushOp& a, const PushOp& b) { return a.in_port < b.in_port; });
    std::sort(step.pops.begin(), step.pops.end(),
              [](const PopOp& a, const PopOp& b) { return a.out_port < b.out_port; });
    std::sort(step.selects.begin(), step.selects.end(),
              [](const MuxSelect& a, const MuxSelect& b) { return a.out_port < b.out_port; });
  }
  return arch;
}

std::uint64_t structures_to_control(const Binding& binding, const Architecture& arch) {
  return structures_to_control(binding, arch.mux_count());
}

SimReport simulate(const AccessTrace& trace, const Architecture& arch) {
  if (arch.n != trace.size()) {
    throw Error(ErrorKind::Validation, "netlist and trace disagree on the frame length");
  }
  return simulate(trace, arch.binding());
}

void emit_netlist(const Architecture& arch, std::ostream& out) {
  out << "# STAR netlist\n";
  out << "version " << kNetlistVersion << '\n';
  out << "design n=" << arch.n << " p_in=" << arch.p_in << " p_out=" << arch.p_out
      << " word_bits=" << arch.word_bits << " total_cycles=" << arch.total_cycles << '\n';
  out << "structures " << arch.structures.size() << '\n';
  for (const auto& s : arch.structures) {
    out << "s " << s.id << ' ' << to_string(s.kind) << " depth=" << s.depth
        << " peak=" << s.peak_occupancy << " traffic=" << s.traffic
        << " src=" << join(s.source_ports) << " dst=" << join(s.sink_ports)
        << " window=" << s.first_write << ':' << s.last_read << " data=" << join(s.data) << '\n';
  }
  out << "routing\n";
  for (std::size_t p = 0; p < arch.input_routes.size(); ++p) {
    out << "in " << p << ' ' << join(arch.input_routes[p]) << '\n';
  }
  for (std::size_t p = 0; p < arch.output_feeds.size(); ++p) {
    out << "out " << p << ' ' << join(arch.output_feeds[p]) << '\n';
  }
  out << "control " << arch.control.size() << '\n';
  for (std::size_t t = 0; t < arch.control.size(); ++t) {
    const auto& step = arch.control[t];
    out << "c " << t << " push=";
    if (step.pushes.empty()) out << '-';
    for (std::size_t i = 0; i < step.pushes.size(); ++i) {
      out << (i ? "," : "") << step.pushes[i].structure << '@' << step.pushes[i].in_port;
    }
    out << " pop=";
    if (step.pops.empty()) out << '-';
    for (std::size_t i = 0; i < step.pops.size(); ++i) {
      out << (i ? "," : "") << step.pops[i].structure << '@' << step.pops[i].out_port;
    }
    out << " sel=";
    if (step.selects.empty()) out << '-';
    for (std::size_t i = 0; i < step.selects.size(); ++i) {
      out << (i ? "," : "") << step.selects[i].out_port << ':' << step.selects[i].index;
    }
    out << '\n';
  }
  out << "end\n";
}

void emit_netlist(const Architecture& arch, const std::filesystem::path& path) {
  auto out = open_out(path, "netlist");
  emit_netlist(arch, out);
}

Architecture load_netlist(std::istream& in) {
  LineReader r(in);
  Architecture arch;

  const auto version = r.expect("version", 2);
  if (r.number<int>(version[1], "version") != kNetlistVersion) {
    r.fail("unsupported netlist version " + version[1]);
  }
  const auto design = r.expect("design", 6);
  arch.n = r.number<std::size_t>(r.field(design[1], "n"), "n");
  arch.p_in = r.number<std::uint32_t>(r.field(design[2], "p_in"), "p_in");
  arch.p_out = r.number<std::uint32_t>(r.field(design[3], "p_out"), "p_out");
  arch.word_bits = r.number<std::uint32_t>(r.field(design[4], "word_bits"), "word_bits");
  arch.total_cycles = r.number<Cycle>(r.field(design[5], "total_cycles"), "total_cycles");

  const auto count = r.number<std::size_t>(r.expect("structures", 2)[1], "structure count");
  for (std::size_t i = 0; i < count; ++i) {
    const auto t = r.expect("s", 10);
    StorageStructure s;
    s.id = r.number<std::uint32_t>(t[1], "structure id");
    if (s.id != i) r.fail("structure ids must be dense and ordered");
    try {
      s.kind = storage_kind_from_string(t[2]);
    } catch (const Error& e) {
      r.fail(e.what());
    }
    s.depth = r.number<std::uint32_t>(r.field(t[3], "depth"), "depth");
    s.peak_occupancy = r.number<std::uint32_t>(r.field(t[4], "peak"), "peak");
    s.traffic = r.number<std::uint32_t>(r.field(t[5], "traffic"), "traffic");
    s.source_ports = r.list<PortId>(r.field(t[6], "src"), "source port");
    s.sink_ports = r.list<PortId>(r.field(t[7], "dst"), "sink port");
    const auto window = r.field(t[8], "window");
    const auto colon = window.find(':');
    if (colon == std::string::npos) r.fail("window must be <first>:<last>");
    s.first_write = r.number<Cycle>(window.substr(0, colon), "window start");
    s.last_read = r.number<Cycle>(window.substr(colon + 1), "window end");
    s.data = r.list<DatumId>(r.field(t[9], "data"), "datum");
    if (!std::is_sorted(s.source_ports.begin(), s.source_ports.end()) ||
        !std::is_sorted(s.sink_ports.begin(), s.sink_ports.end())) {
      r.fail("port lists must be sorted");
    }
    arch.structures.push_back(std::move(s));
  }

  r.expect("routing", 1);
  arch.input_routes.resize(arch.p_in);
  arch.output_feeds.resize(arch.p_out);
  for (std::uint32_t p = 0; p < arch.p_in; ++p) {
    const auto t = r.expect("in", 3);
    if (r.number<std::uint32_t>(t[1], "port") != p) r.fail("input routes must be in port order");
    arch.input_routes[p] = r.list<std::uint32_t>(t[2], "structure id");
  }
  for (std::uint32_t p = 0; p < arch.p_out; ++p) {
    const auto t = r.expect("out", 3);
    if (r.number<std::uint32_t>(t[1], "port") != p) r.fail("output feeds must be in port order");
    arch.output_feeds[p] = r.list<std::uint32_t>(t[2], "structure id");
  }

  const auto steps = r.number<std::size_t>(r.expect("control", 2)[1], "control length");
  for (std::size_t i = 0; i < steps; ++i) {
    const auto t = r.expect("c", 5);
    if (r.number<std::size_t>(t[1], "cycle") != i) r.fail("control steps must be consecutive");
    ControlStep step;
    for (auto [sid, port] : r.pairs(r.field(t[2], "push"), '@', "push")) {
      step.pushes.push_back({sid, port});
    }
    for (auto [sid, port] : r.pairs(r.field(t[3], "pop"), '@', "pop")) {
      step.pops.push_back({sid, port});
    }
    for (auto [port, index] : r.pairs(r.field(t[4], "sel"), ':', "select")) {
      step.selects.push_back({port, index});
    }
    arch.control.push_back(std::move(step));
  }
  r.expect("end", 1);
  if (!r.next().empty()) r.fail("content after 'end'");

  arch.validate();
  return arch;
}

Architecture load_netlist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open netlist " + path.string());
  return load_netlist(in);
}

void emit_hdl(const Architecture& arch, std::ostream& out) {
  const std::size_t s_count = arch.structures.size();
  const std::size_t cycles = arch.control.size();
  std::size_t max_src = 1;
  std::size_t max_feed = 1;
  for (const auto& s : arch.structures) max_src = std::max(max_src, s.source_ports.size());
  for (const auto& f : arch.output_feeds) max_feed = std::max(max_feed, f.size());
  const std::uint32_t in_bits = select_bits(max_src);
  const std::uint32_t out_bits = select_bits(max_feed);
  auto multi_source = [&](const StorageStructure& s) { return s.source_ports.size() >= 2; };

  out << "-- STAR adapter: " << s_count << " storage elements, " << arch.mux_count()
      << " output muxes, " << cycles << " control steps\n\n";
  out << kTemplates << '\n';

  // Controller.
  out << "library ieee;\nuse ieee.std_logic_1164.all;\n\n";
  out << "entity star_ctrl is\n  port (\n    clk       : in  std_logic;\n"
      << "    rst       : in  std_logic;\n"
      << "    push_en   : out std_logic_vector(" << s_count - 1 << " downto 0);\n"
      << "    pop_en    : out std_logic_vector(" << s_count - 1 << " downto 0);\n"
      << "    out_valid : out std_logic_vector(" << arch.p_out - 1 << " downto 0);\n";
  for (const auto& s : arch.structures) {
    if (multi_source(s)) {
      out << "    in_sel_" << s.id << " : out std_logic_vector(" << in_bits - 1 << " downto 0);\n";
    }
  }
  for (std::size_t p = 0; p < arch.p_out; ++p) {
    if (arch.output_feeds[p].size() >= 2) {
      out << "    out_sel_" << p << " : out std_logic_vector(" << out_bits - 1 << " downto 0);\n";
    }
  }
  out << "    done      : out std_logic\n  );\nend entity star_ctrl;\n\n";
  out << "architecture rom of star_ctrl is\n";
  out << "  constant STEPS : positive := " << cycles << ";\n";

  auto rom = [&](const std::string& name, std::uint32_t width, auto&& word_at) {
    out << "  type " << name << "_t is array (0 to STEPS - 1) of std_logic_vector(" << width - 1
        << " downto 0);\n";
    out << "  constant " << name << " : " << name << "_t := (\n";
    for (std::size_t t = 0; t < cycles; ++t) {
      out << "    " << t << " => " << bit_string(word_at(t), width)
          << (t + 1 < cycles ? ",\n" : "\n");
    }
    out << "  );\n";
  };
  auto enable_word = [&](std::size_t t, bool pushes) {
    std::string bits(s_count, '0');
    const auto& step = arch.control[t];
    if (pushes) {
      for (const auto& op : step.pushes) bits[s_count - 1 - op.structure] = '1';
    } else {
      for (const auto& op : step.pops) bits[s_count - 1 - op.structure] = '1';
    }
    return "\"" + bits + "\"";
  };
  for (const bool pushes : {true, false}) {
    const std::string name = pushes ? "PUSH_ROM" : "POP_ROM";
    out << "  type " << name << "_t is array (0 to STEPS - 1) of std_logic_vector(" << s_count - 1
        << " downto 0);\n";
    out << "  constant " << name << " : " << name << "_t := (\n";
    for (std::size_t t = 0; t < cycles; ++t) {
      out << "    " << t << " => " << enable_word(t, pushes) << (t + 1 < cycles ? ",\n" : "\n");
    }
    out << "  );\n";
  }
  rom("VALID_ROM", arch.p_out, [&](std::size_t t) {
    std::uint64_t w = 0;
    for (const auto& op : arch.control[t].pops) w |= std::uint64_t{1} << op.out_port;
    return w;
  });
  for (const auto& s : arch.structures) {
    if (!multi_source(s)) continue;
    rom("IN_SEL_ROM_" + std::to_string(s.id), in_bits, [&](std::size_t t) {
      for (const auto& op : arch.control[t].pushes) {
        if (op.structure == s.id) {
          return static_cast<std::uint64_t>(
              std::lower_bound(s.source_ports.begin(), s.source_ports.end(), op.in_port) -
              s.source_ports.begin());
        }
      }
      return std::uint64_t{0};
    });
  }
  for (std::size_t p = 0; p < arch.p_out; ++p) {
    if (arch.output_feeds[p].size() < 2) continue;
    rom("OUT_SEL_ROM_" + std::to_string(p), out_bits, [&](std::size_t t) {
      for (const auto& sel : arch.control[t].selects) {
        if (sel.out_port == p) return static_cast<std::uint64_t>(sel.index);
      }
      return std::uint64_t{0};
    });
  }
  out << "  signal step : natural range 0 to STEPS := 0;\n";
  out << "begin\n";
  out << "  process (clk)\n  begin\n    if rising_edge(clk) then\n"
      << "      if rst = '1' then\n        step <= 0;\n"
      << "      elsif step < STEPS then\n        step <= step + 1;\n      end if;\n"
      << "    end if;\n  end process;\n\n";
  out << "  done      <= '1' when step = STEPS else '0';\n";
  out << "  push_en   <= PUSH_ROM(step) when step < STEPS else (others => '0');\n";
  out << "  pop_en    <= POP_ROM(step) when step < STEPS else (others => '0');\n";
  out << "  out_valid <= VALID_ROM(step) when step < STEPS else (others => '0');\n";
  for (const auto& s : arch.structures) {
    if (multi_source(s)) {
      out << "  in_sel_" << s.id << " <= IN_SEL_ROM_" << s.id
          << "(step) when step < STEPS else (others => '0');\n";
    }
  }
  for (std::size_t p = 0; p < arch.p_out; ++p) {
    if (arch.output_feeds[p].size() >= 2) {
      out << "  out_sel_" << p << " <= OUT_SEL_ROM_" << p
          << "(step) when step < STEPS else (others => '0');\n";
    }
  }
  out << "end architecture rom;\n\n";

  // Top level.
  const std::uint32_t w = arch.word_bits;
  out << "library ieee;\nuse ieee.std_logic_1164.all;\n\n";
  out << "entity star_top is\n  port (\n    clk        : in  std_logic;\n"
      << "    rst        : in  std_logic;\n";
  for (std::uint32_t p = 0; p < arch.p_in; ++p) {
    out << "    din_" << p << "      : in  std_logic_vector(" << w - 1 << " downto 0);\n";
  }
  for (std::uint32_t p = 0; p < arch.p_out; ++p) {
    out << "    dout_" << p << "     : out std_logic_vector(" << w - 1 << " downto 0);\n";
  }
  out << "    dout_valid : out std_logic_vector(" << arch.p_out - 1 << " downto 0);\n"
      << "    done       : out std_logic\n  );\nend entity star_top;\n\n";
  out << "architecture structural of star_top is\n";
  out << "  signal push_en : std_logic_vector(" << s_count - 1 << " downto 0);\n";
  out << "  signal pop_en  : std_logic_vector(" << s_count - 1 << " downto 0);\n";
  for (const auto& s : arch.structures) {
    out << "  signal s" << s.id << "_din, s" << s.id << "_dout : std_logic_vector(" << w - 1
        << " downto 0);\n";
    if (multi_source(s)) {
      out << "  signal in_sel_" << s.id << " : std_logic_vector(" << in_bits - 1 << " downto 0);\n";
    }
  }
  for (std::size_t p = 0; p < arch.p_out; ++p) {
    if (arch.output_feeds[p].size() >= 2) {
      out << "  signal out_sel_" << p << " : std_logic_vector(" << out_bits - 1 << " downto 0);\n";
    }
  }
  out << "begin\n";
  out << "  ctrl : entity work.star_ctrl\n    port map (\n      clk       => clk,\n"
      << "      rst       => rst,\n      push_en   => push_en,\n      pop_en    => pop_en,\n"
      << "      out_valid => dout_valid,\n";
  for (const auto& s : arch.structures) {
    if (multi_source(s)) out << "      in_sel_" << s.id << " => in_sel_" << s.id << ",\n";
  }
  for (std::size_t p = 0; p < arch.p_out; ++p) {
    if (arch.output_feeds[p].size() >= 2) {
      out << "      out_sel_" << p << " => out_sel_" << p << ",\n";
    }
  }
  out << "      done      => done\n    );\n\n";

  for (const auto& s : arch.structures) {
    if (!multi_source(s)) {
      out << "  s" << s.id << "_din <= din_" << s.source_ports.front() << ";\n";
      continue;
    }
    out << "  with in_sel_" << s.id << " select\n    s" << s.id << "_din <=";
    for (std::size_t i = 0; i < s.source_ports.size(); ++i) {
      out << (i ? "              " : " ") << "din_" << s.source_ports[i] << " when "
          << bit_string(i, in_bits) << ",\n";
    }
    out << "              (others => '0') when others;\n";
  }
  out << '\n';

  for (const auto& s : arch.structures) {
    out << "  u" << s.id << " : entity work." << entity_for(s.kind) << '\n';
    out << "    generic map (WIDTH => " << w;
    if (s.kind != StorageKind::Reg) out << ", DEPTH => " << s.depth;
    out << ")\n";
    out << "    port map (clk => clk, rst => rst, push => push_en(" << s.id << "), pop => pop_en("
        << s.id << "),\n              din => s" << s.id << "_din, dout => s" << s.id
        << "_dout);\n";
  }
  out << '\n';

  for (std::size_t p = 0; p < arch.p_out; ++p) {
    const auto& feeds = arch.output_feeds[p];
    if (feeds.empty()) {
      out << "  dout_" << p << " <= (others => '0');\n";
    } else if (feeds.size() == 1) {
      out << "  dout_" << p << " <= s" << feeds.front() << "_dout;\n";
    } else {
      out << "  with out_sel_" << p << " select\n    dout_" << p << " <=";
      for (std::size_t i = 0; i < feeds.size(); ++i) {
        out << (i ? "              " : " ") << "s" << feeds[i] << "_dout when "
            << bit_string(i, out_bits) << ",\n";
      }
      out << "              (others => '0') when others;\n";
    }
  }
  out << "end architecture structural;\n";
}

void emit_hdl(const Architecture& arch, const std::filesystem::path& path) {
  auto out = open_out(path, "HDL");
  emit_hdl(arch, out);
}

void emit_vectors(const AccessTrace& trace, std::ostream& out) {
  struct Row {
    Cycle cycle;
    int kind;  // reads precede writes within a cycle
    PortId port;
    DatumId datum;
  };
  std::vector<Row> rows;
  rows.reserve(2 * trace.size());
  for (const auto& e : trace.events) {
    rows.push_back({e.read_cycle, 0, e.read_port, e.datum});
    rows.push_back({e.write_cycle, 1, e.write_port, e.datum});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tuple(a.cycle, a.kind, a.port) < std::tuple(b.cycle, b.kind, b.port);
  });
  out << "cycle,port_kind,port_index,datum\n";
  std::size_t next = 0;
  for (Cycle t = 0; t < trace.total_cycles; ++t) {
    if (next == rows.size() || rows[next].cycle != t) {
      out << t << ",idle,-,-\n";
      continue;
    }
    for (; next < rows.size() && rows[next].cycle == t; ++next) {
      const auto& r = rows[next];
      out << t << ',' << (r.kind == 0 ? "out" : "in") << ',' << r.port << ',' << r.datum << '\n';
    }
  }
}

void emit_vectors(const AccessTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path, "vectors");
  emit_vectors(trace, out);
}

}  // namespace star
