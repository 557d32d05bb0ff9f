#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace star {

using DatumId = std::uint32_t;

/// An interleaving law over a frame of n data.
///
/// Convention: map is read-position -> write-position. The datum delivered
/// at read-order position j is the one written at position map[j]. Data are
/// identified by their write-order position, so map[j] is also a datum id.
class Permutation {
 public:
  /// Validates the bijection invariant; throws Error on violation.
  explicit Permutation(std::vector<DatumId> map);

  std::size_t size() const noexcept { return map_.size(); }
  DatumId operator[](std::size_t read_pos) const { return map_[read_pos]; }
  const std::vector<DatumId>& map() const noexcept { return map_; }

  /// inverse()[d] is the read position of datum d.
  std::vector<std::size_t> inverse() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<DatumId> map_;
};

Permutation gen_identity(std::size_t n);

/// Row-wise fill of a rows x cols matrix, column-wise read.
Permutation gen_block(std::size_t rows, std::size_t cols);

Permutation gen_reverse(std::size_t n);

/// Seeded Fisher-Yates shuffle driven by std::mt19937_64 with rejection
/// sampling for the bounded draws, so results are identical on every
/// conforming platform.
Permutation gen_random(std::size_t n, std::uint64_t seed);

/// Table format: optional "n=<N>" header, then whitespace-separated indices
/// in read order. '#' starts a comment that runs to end of line.
Permutation parse_table(std::istream& in);
Permutation load_table(const std::filesystem::path& path);
void write_table(const Permutation& perm, std::ostream& out);

/// Parses generator specs such as "identity:8", "block:20x30", "reverse:16",
/// "random:64". The seed is only used by "random".
Permutation from_generator_spec(const std::string& spec, std::uint64_t seed);

}  // namespace star
