#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "star/error.hpp"
#include "star/simulator.hpp"

using namespace star;

namespace {

// a=0 c=1 b=2 e=3 f=4 d=5; read order c,a,e,b,d,f.
Permutation reorder6() { return Permutation({1, 0, 3, 2, 5, 4}); }

AccessTrace trace_of(const Permutation& p, std::uint32_t p_in = 1, std::uint32_t p_out = 1) {
  ScheduleConfig cfg;
  cfg.p_in = p_in;
  cfg.p_out = p_out;
  return build_trace(p, cfg);
}

Binding single_structure(StorageKind kind, const AccessTrace& t) {
  std::vector<DatumId> all(t.size());
  for (DatumId d = 0; d < t.size(); ++d) all[d] = d;
  Binding b;
  b.structures.push_back(make_structure(kind, all, t));
  b.assignment.assign(t.size(), 0);
  return b;
}

Binding designed(const AccessTrace& t, const ExplorationParams& p = {}) {
  return merge(bind(t, build_graph(t), p), t, p);
}

}  // namespace

TEST_CASE("identity through one FIFO") {
  const auto t = trace_of(gen_identity(4));
  const auto r = simulate(t, designed(t));
  CHECK(r.ok);
  CHECK(r.violations.empty());
  CHECK(r.cycles == t.total_cycles);
  REQUIRE(r.structures.size() == 1);
  CHECK(r.structures[0].observed_peak == 1);
  CHECK(r.structures[0].observed_traffic == 4);

  std::ostringstream os;
  write_output_log(r, os);
  CHECK(os.str() ==
        "cycle 1 port 0 -> datum 0\ncycle 2 port 0 -> datum 1\n"
        "cycle 3 port 0 -> datum 2\ncycle 4 port 0 -> datum 3\n");
}

TEST_CASE("six-datum reorder: design replays cleanly") {
  const auto t = trace_of(reorder6());
  const auto b = designed(t);
  const auto r = simulate(t, b);
  CHECK(r.ok);
  for (std::size_t i = 0; i < b.structures.size(); ++i) {
    CHECK(r.structures[i].observed_peak == b.structures[i].peak_occupancy);
  }
}

TEST_CASE("forcing a, b and c into one FIFO delivers the wrong datum") {
  const auto t = trace_of(reorder6());
  Binding b;
  b.structures.push_back(make_structure(StorageKind::Fifo, {0, 1, 2}, t));
  for (DatumId d : {3u, 4u, 5u}) b.structures.push_back(make_structure(StorageKind::Reg, {d}, t));
  b.assignment = {0, 0, 0, 1, 2, 3};
  const auto r = simulate(t, b);
  CHECK_FALSE(r.ok);
  REQUIRE_FALSE(r.violations.empty());
  const auto& v = r.violations.front();
  CHECK(v.kind == ViolationKind::WrongDatum);
  CHECK(v.cycle == 2);  // c is read first
  CHECK(v.expected == 1);
  CHECK(v.observed == DatumId{0});
  CHECK(v.describe() == "wrong-datum at cycle 2 on structure 0: datum 1 (got 0)");
}

TEST_CASE("depth below peak overflows") {
  const auto t = trace_of(gen_reverse(4));
  auto b = single_structure(StorageKind::Lifo, t);
  REQUIRE(simulate(t, b).ok);
  b.structures[0].depth = 2;
  const auto r = simulate(t, b);
  CHECK_FALSE(r.ok);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations.front().kind == ViolationKind::Overflow);
  CHECK(r.violations.front().cycle == 2);
}

TEST_CASE("same-cycle accesses on one structure are flagged") {
  const auto t = trace_of(gen_identity(4), 2, 2);
  const auto r = simulate(t, single_structure(StorageKind::Fifo, t));
  CHECK_FALSE(r.ok);
  CHECK(std::any_of(r.violations.begin(), r.violations.end(),
                    [](const Violation& v) { return v.kind == ViolationKind::DoubleAccess; }));
}

TEST_CASE("read from an empty structure underflows") {
  // Reverse(2) with both data in one register: pushing 1 overwrites 0, so
  // the read of 0 finds the register empty.
  const auto t = trace_of(gen_reverse(2));
  Binding b;
  auto reg = make_structure(StorageKind::Reg, {0}, t);
  reg.data = {0, 1};
  b.structures.push_back(reg);
  b.assignment = {0, 0};
  const auto r = simulate(t, b);
  CHECK_FALSE(r.ok);
  REQUIRE(r.violations.size() == 2);
  CHECK(r.violations[0].kind == ViolationKind::Overflow);
  CHECK(r.violations[0].cycle == 1);
  CHECK(r.violations[1].kind == ViolationKind::Underflow);
  CHECK(r.violations[1].cycle == 3);
  CHECK(r.violations[1].expected == 0);
  REQUIRE(r.outputs.size() == 2);
  CHECK(r.outputs[0].datum == DatumId{1});
  CHECK_FALSE(r.outputs[1].datum.has_value());
}

TEST_CASE("malformed binding is rejected") {
  const auto t = trace_of(gen_identity(3));
  auto b = single_structure(StorageKind::Fifo, t);
  b.assignment[1] = 7;
  CHECK_THROWS_AS(simulate(t, b), Error);
  b.assignment.pop_back();
  CHECK_THROWS_AS(simulate(t, b), Error);
}

TEST_CASE("latency") {
  CHECK(latency(trace_of(gen_identity(4))).max_latency == 1);
  CHECK(latency(trace_of(gen_reverse(4))).max_latency == 7);
  CHECK(latency(trace_of(gen_reverse(4))).first_read == 4);
  const auto f = latency(trace_of(reorder6()));
  CHECK(f.max_latency == 3);
  CHECK(f.first_read == 2);
}

TEST_CASE("observed occupancy and traffic match the binder's predictions") {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 120; ++iter) {
    const std::size_t n = 1 + rng() % 200;
    const auto t = trace_of(gen_random(n, rng()), 1 + rng() % 8, 1 + rng() % 8);
    ExplorationParams p;
    p.min_size = 1 + static_cast<std::uint32_t>(rng() % 4);
    p.mux_factor_on = rng() % 2;
    const auto b = designed(t, p);
    const auto r = simulate(t, b);
    REQUIRE(r.ok);
    for (std::size_t i = 0; i < b.structures.size(); ++i) {
      CHECK(r.structures[i].observed_peak == b.structures[i].peak_occupancy);
      CHECK(r.structures[i].observed_traffic == b.structures[i].traffic);
      CHECK(r.structures[i].observed_peak == oracle::brute_peak(b.structures[i].data, t));
    }
  }
}
