#include "star/permutation.hpp"

#include <charconv>
#include <limits>
#include <optional>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "star/error.hpp"

namespace star {

namespace {

void check_bijection(const std::vector<DatumId>& map) {
  const std::size_t n = map.size();
  if (n == 0) {
    throw Error(ErrorKind::InvalidSize, "permutation must hold at least one datum");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const DatumId v = map[j];
    if (v >= n) {
      throw Error(ErrorKind::Validation,
                  "index " + std::to_string(v) + " at position " + std::to_string(j) +
                      " is out of range for n=" + std::to_string(n));
    }
    if (seen[v]) {
      throw Error(ErrorKind::DuplicateIndex,
                  "duplicate index " + std::to_string(v) + " at position " + std::to_string(j));
    }
    seen[v] = true;
  }
  // Unreachable for a length-n map without duplicates, kept for clarity of
  // the error surface.
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) {
      throw Error(ErrorKind::MissingIndex, "missing index " + std::to_string(v));
    }
  }
}

// Unbiased draw in [0, bound) from a 64-bit engine.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw Error(ErrorKind::Parse, "bad " + what + " '" + text + "'");
  }
  return value;
}

}  // namespace

Permutation::Permutation(std::vector<DatumId> map) : map_(std::move(map)) {
  check_bijection(map_);
}

std::vector<std::size_t> Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t j = 0; j < map_.size(); ++j) inv[map_[j]] = j;
  return inv;
}

Permutation gen_identity(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidSize, "identity: n must be >= 1");
  std::vector<DatumId> map(n);
  for (std::size_t j = 0; j < n; ++j) map[j] = static_cast<DatumId>(j);
  return Permutation(std::move(map));
}

Permutation gen_block(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorKind::InvalidSize, "block: rows and cols must be >= 1");
  }
  const std::size_t n = rows * cols;
  std::vector<DatumId> map(n);
  for (std::size_t j = 0; j < n; ++j) {
    map[j] = static_cast<DatumId>((j % rows) * cols + j / rows);
  }
  return Permutation(std::move(map));
}

Permutation gen_reverse(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidSize, "reverse: n must be >= 1");
  std::vector<DatumId> map(n);
  for (std::size_t j = 0; j < n; ++j) map[j] = static_cast<DatumId>(n - 1 - j);
  return Permutation(std::move(map));
}

Permutation gen_random(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidSize, "random: n must be >= 1");
  std::vector<DatumId> map(n);
  for (std::size_t j = 0; j < n; ++j) map[j] = static_cast<DatumId>(j);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(map[i], map[bounded(rng, i + 1)]);
  }
  return Permutation(std::move(map));
}

Permutation parse_table(std::istream& in) {
  std::vector<DatumId> map;
  std::optional<std::size_t> declared;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      if (tok.rfind("n=", 0) == 0) {
        if (declared || !map.empty()) {
          throw Error(ErrorKind::Parse,
                      "line " + std::to_string(line_no) + ": header must come first");
        }
        declared = parse_count(tok.substr(2), "header");
        continue;
      }
      try {
        const std::size_t v = parse_count(tok, "index");
        if (v > std::numeric_limits<DatumId>::max()) {
          throw Error(ErrorKind::Parse, "index too large");
        }
        map.push_back(static_cast<DatumId>(v));
      } catch (const Error& e) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (declared && *declared != map.size()) {
    throw Error(ErrorKind::Validation, "header declares n=" + std::to_string(*declared) +
                                           " but table holds " + std::to_string(map.size()) +
                                           " indices");
  }
  return Permutation(std::move(map));
}

Permutation load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open permutation table " + path.string());
  return parse_table(in);
}

void write_table(const Permutation& perm, std::ostream& out) {
  out << "n=" << perm.size() << '\n';
  for (std::size_t j = 0; j < perm.size(); ++j) {
    out << perm[j] << ((j + 1) % 16 == 0 || j + 1 == perm.size() ? '\n' : ' ');
  }
}

Permutation from_generator_spec(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::Parse, "generator spec '" + spec + "' lacks ':<args>'");
  }
  const std::string name = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (name == "block") {
    const auto x = args.find('x');
    if (x == std::string::npos) {
      throw Error(ErrorKind::Parse, "block generator expects <rows>x<cols>");
    }
    return gen_block(parse_count(args.substr(0, x), "rows"),
                     parse_count(args.substr(x + 1), "cols"));
  }
  const std::size_t n = parse_count(args, "frame length");
  if (name == "identity") return gen_identity(n);
  if (name == "reverse") return gen_reverse(n);
  if (name == "random") return gen_random(n, seed);
  throw Error(ErrorKind::Parse, "unknown generator '" + name + "'");
}

}  // namespace star
