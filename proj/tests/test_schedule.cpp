#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "star/error.hpp"
#include "star/schedule.hpp"

using namespace star;

namespace {

// Data a..f numbered by write order: a=0 c=1 b=2 e=3 f=4 d=5. The read
// order c,a,e,b,d,f becomes map = [1,0,3,2,5,4].
Permutation reorder6() { return Permutation({1, 0, 3, 2, 5, 4}); }

ScheduleConfig unit(std::uint32_t p_in = 1, std::uint32_t p_out = 1) {
  ScheduleConfig c;
  c.p_in = p_in;
  c.p_out = p_out;
  return c;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("six-datum reorder: schedule") {
  const auto t = build_trace(reorder6(), unit());
  CHECK(t.first_read == 2);
  CHECK(t.total_cycles == 8);
  for (DatumId d = 0; d < 6; ++d) {
    CHECK(t[d].write_cycle == d);
    CHECK(t[d].write_port == 0);
  }
  // c is read first at cycle 2, f last at cycle 7.
  CHECK(t[1].read_cycle == 2);
  CHECK(t[0].read_cycle == 3);
  CHECK(t[4].read_cycle == 7);
  CHECK(t.read_order() == std::vector<DatumId>{1, 0, 3, 2, 5, 4});
}

TEST_CASE("identity and reverse offsets") {
  const auto id = build_trace(gen_identity(4), unit());
  CHECK(id.first_read == 1);
  for (DatumId d = 0; d < 4; ++d) CHECK(id[d].read_cycle == d + 1);
  CHECK(build_trace(gen_reverse(4), unit()).first_read == 4);
}

TEST_CASE("explicit read offset") {
  ScheduleConfig c = unit();
  c.read_offset = 5;
  const auto t = build_trace(reorder6(), c);
  CHECK(t.first_read == 5);
  CHECK(t.total_cycles == 11);
  validate_trace(t);

  c.read_offset = 1;
  try {
    build_trace(reorder6(), c);
    FAIL("expected causality error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Causality);
    CHECK(std::string(e.what()).find("datum 1") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  ScheduleConfig c;
  c.p_in = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidParams);
  c = ScheduleConfig{};
  c.clock_ns = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidParams);
  c = ScheduleConfig{};
  c.word_bits = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidParams);
}

TEST_CASE("trace invariants hold on random laws") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + rng() % 120;
    const auto perm = gen_random(n, rng());
    const auto cfg = unit(1 + rng() % 8, 1 + rng() % 8);
    const auto t = build_trace(perm, cfg);
    validate_trace(t);

    std::set<std::pair<Cycle, PortId>> w;
    std::set<std::pair<Cycle, PortId>> r;
    for (const auto& e : t.events) {
      CHECK(w.insert({e.write_cycle, e.write_port}).second);
      CHECK(r.insert({e.read_cycle, e.read_port}).second);
      CHECK(e.read_cycle > e.write_cycle);
    }
    // Minimality against a brute-force search.
    CHECK(t.first_read == oracle::brute_min_read_offset(perm, cfg.p_in, cfg.p_out));
    if (t.first_read > 1) {
      ScheduleConfig early = cfg;
      early.read_offset = t.first_read - 1;
      CHECK(kind_of([&] { build_trace(perm, early); }) == ErrorKind::Causality);
    }
    CHECK(t.read_order() == perm.map());
  }
}

TEST_CASE("trace file round trip") {
  ScheduleConfig c = unit(3, 2);
  c.clock_ns = 12.5;
  c.word_bits = 6;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = build_trace(gen_random(25, seed), c);
    std::stringstream ss;
    write_trace(t, ss);
    CHECK(read_trace(ss) == t);
  }
  std::stringstream ss;
  const auto f = build_trace(reorder6(), unit());
  write_trace(f, ss);
  CHECK(ss.str().substr(0, ss.str().find('\n')) ==
        "n=6 p_in=1 p_out=1 word_bits=8 clock_ns=10");
  CHECK(read_trace(ss) == f);
}

TEST_CASE("trace reader rejects broken files") {
  SUBCASE("two writes in one slot") {
    std::istringstream in(
        "n=2 p_in=1 p_out=1 word_bits=8 clock_ns=10\n"
        "0 w 0 0 r 1 0\n"
        "1 w 0 0 r 2 0\n");
    CHECK(kind_of([&] { read_trace(in); }) == ErrorKind::Collision);
  }
  SUBCASE("read in the write cycle") {
    std::istringstream in(
        "n=2 p_in=1 p_out=1 word_bits=8 clock_ns=10\n"
        "0 w 0 0 r 0 0\n"
        "1 w 1 0 r 2 0\n");
    CHECK(kind_of([&] { read_trace(in); }) == ErrorKind::Causality);
  }
  SUBCASE("missing datum") {
    std::istringstream in(
        "n=2 p_in=1 p_out=1 word_bits=8 clock_ns=10\n"
        "0 w 0 0 r 1 0\n");
    CHECK(kind_of([&] { read_trace(in); }) == ErrorKind::Validation);
  }
  SUBCASE("port outside parallelism") {
    std::istringstream in(
        "n=1 p_in=1 p_out=1 word_bits=8 clock_ns=10\n"
        "0 w 0 1 r 1 0\n");
    CHECK(kind_of([&] { read_trace(in); }) == ErrorKind::Validation);
  }
  SUBCASE("malformed line") {
    std::istringstream in(
        "n=1 p_in=1 p_out=1 word_bits=8 clock_ns=10\n"
        "0 w 0 0 1 0\n");
    CHECK(kind_of([&] { read_trace(in); }) == ErrorKind::Parse);
  }
}

TEST_CASE("throughput") {
  AccessTrace t;
  t.events.resize(600);
  t.config.word_bits = 8;
  t.config.clock_ns = 80;
  t.total_cycles = 220;
  CHECK(std::round(throughput_mbps(t) * 10) / 10 == doctest::Approx(272.7));
  t.config.clock_ns = 160;
  CHECK(throughput_mbps(t) == doctest::Approx(272.727272 / 2).epsilon(1e-6));

  AccessTrace one;
  one.events.resize(1);
  one.config.word_bits = 1;
  one.config.clock_ns = 1000;
  one.total_cycles = 2;
  CHECK(throughput_mbps(one) == doctest::Approx(0.5));
}
