#include <algorithm>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "star/error.hpp"
#include "star/permutation.hpp"

using namespace star;

namespace {

std::vector<DatumId> ids(std::initializer_list<DatumId> v) { return v; }

bool is_bijection(const Permutation& p) {
  auto sorted = p.map();
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
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

TEST_CASE("identity") {
  CHECK(gen_identity(4).map() == ids({0, 1, 2, 3}));
  CHECK(gen_identity(1).map() == ids({0}));
  CHECK(kind_of([] { gen_identity(0); }) == ErrorKind::InvalidSize);
}

TEST_CASE("block interleaver fills rows and reads columns") {
  CHECK(gen_block(2, 3).map() == ids({0, 3, 1, 4, 2, 5}));
  CHECK(gen_block(1, 5) == gen_identity(5));
  CHECK(gen_block(4, 1) == gen_identity(4));
  CHECK(kind_of([] { gen_block(0, 3); }) == ErrorKind::InvalidSize);
  CHECK(kind_of([] { gen_block(3, 0); }) == ErrorKind::InvalidSize);
}

TEST_CASE("reverse") {
  CHECK(gen_reverse(4).map() == ids({3, 2, 1, 0}));
  // Composing reverse with itself is the identity.
  const auto r = gen_reverse(9);
  for (std::size_t j = 0; j < r.size(); ++j) CHECK(r[r[j]] == j);
}

TEST_CASE("random is deterministic per seed and a bijection") {
  CHECK(gen_random(8, 1) == gen_random(8, 1));
  CHECK(gen_random(64, 1) != gen_random(64, 2));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CHECK(is_bijection(gen_random(1 + seed * 7, seed)));
  }
}

TEST_CASE("every generator yields a bijection") {
  for (std::size_t r = 1; r <= 6; ++r) {
    for (std::size_t c = 1; c <= 6; ++c) CHECK(is_bijection(gen_block(r, c)));
  }
  for (std::size_t n = 1; n <= 20; ++n) {
    CHECK(is_bijection(gen_identity(n)));
    CHECK(is_bijection(gen_reverse(n)));
  }
}

TEST_CASE("inverse maps data back to read positions") {
  const auto p = gen_block(3, 4);
  const auto inv = p.inverse();
  for (std::size_t j = 0; j < p.size(); ++j) CHECK(inv[p[j]] == j);
}

TEST_CASE("table loader") {
  SUBCASE("header and comments") {
    std::istringstream in("# law\nn=4\n1 0 # swapped\n3 2\n");
    CHECK(parse_table(in).map() == ids({1, 0, 3, 2}));
  }
  SUBCASE("one index per line without header") {
    std::istringstream in("2\n0\n1\n");
    CHECK(parse_table(in).map() == ids({2, 0, 1}));
  }
  SUBCASE("duplicate index names the offender") {
    std::istringstream in("0 2 1 1");
    try {
      parse_table(in);
      FAIL("expected duplicate error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DuplicateIndex);
      CHECK(std::string(e.what()).find("duplicate index 1") != std::string::npos);
    }
  }
  SUBCASE("out of range index") {
    std::istringstream in("0 1 5");
    CHECK(kind_of([&] { parse_table(in); }) == ErrorKind::Validation);
  }
  SUBCASE("header count mismatch") {
    std::istringstream in("n=3\n0 1");
    CHECK(kind_of([&] { parse_table(in); }) == ErrorKind::Validation);
  }
  SUBCASE("garbage token") {
    std::istringstream in("0 x 1");
    CHECK(kind_of([&] { parse_table(in); }) == ErrorKind::Parse);
  }
  SUBCASE("write then parse gives the same law") {
    const auto p = gen_random(37, 5);
    std::stringstream ss;
    write_table(p, ss);
    CHECK(parse_table(ss) == p);
  }
}

TEST_CASE("generator specs") {
  CHECK(from_generator_spec("block:2x3", 0) == gen_block(2, 3));
  CHECK(from_generator_spec("identity:5", 0) == gen_identity(5));
  CHECK(from_generator_spec("reverse:5", 0) == gen_reverse(5));
  CHECK(from_generator_spec("random:10", 3) == gen_random(10, 3));
  CHECK(kind_of([] { from_generator_spec("zigzag:4", 0); }) == ErrorKind::Parse);
  CHECK(kind_of([] { from_generator_spec("block:4", 0); }) == ErrorKind::Parse);
  CHECK(kind_of([] { from_generator_spec("identity", 0); }) == ErrorKind::Parse);
}
