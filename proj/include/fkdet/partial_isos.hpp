#pragma once

// Measure-preserving partial isomorphisms on the cell model: partial
// injections of the cell set, words over a named generator family, the orbit
// partition of the generated equivalence relation, and treeing diagnostics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fkdet/measured_grid.hpp"

namespace fkdet {

class PartialInjection {
 public:
  static constexpr std::int32_t kUndefined = -1;

  /// The empty map on `space`.
  explicit PartialInjection(DiscreteSpace space);
  /// Takes ownership of a raw target table (kUndefined = outside domain).
  /// Throws if two sources share a target or a target is out of range.
  PartialInjection(DiscreteSpace space, std::vector<std::int32_t> targets);

  static PartialInjection identity(DiscreteSpace space);

  const DiscreteSpace& space() const noexcept { return space_; }
  bool defined_at(std::size_t x) const { return targets_[x] != kUndefined; }
  /// Image of x; x must be in the domain.
  std::size_t operator()(std::size_t x) const {
    return static_cast<std::size_t>(targets_[x]);
  }
  std::span<const std::int32_t> targets() const noexcept { return targets_; }

  CellSet domain() const;
  CellSet range() const;
  std::size_t domain_size() const noexcept { return domain_size_; }
  bool is_full_bijection() const noexcept {
    return domain_size_ == space_.size();
  }

  friend bool operator==(const PartialInjection&,
                         const PartialInjection&) = default;

 private:
  DiscreteSpace space_;
  std::vector<std::int32_t> targets_;
  std::size_t domain_size_ = 0;
};

/// k -> (k + p) mod N on the whole space.
PartialInjection make_rotation(DiscreteSpace space, std::int64_t p);

/// Throws "not a function" on a repeated source, "not injective" on a
/// repeated target.
PartialInjection make_table(
    DiscreteSpace space,
    std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Interval exchange: [0,1) is cut at `cuts` into pieces I_0 < I_1 < ...;
/// piece j is translated so that the pieces appear in the order given by
/// `order` (order[p] = index of the piece placed p-th). Every cut must be a
/// multiple of 1/N.
PartialInjection make_interval_exchange(DiscreteSpace space,
                                        std::span<const double> cuts,
                                        std::span<const std::size_t> order);

PartialInjection invert(const PartialInjection& g);
PartialInjection restrict(const PartialInjection& g, const CellSet& s);
/// x -> g(h(x)) on the maximal domain h^{-1}(range(h) & domain(g)).
PartialInjection compose(const PartialInjection& g, const PartialInjection& h);

CellSet fixed_point_set(const PartialInjection& g);

class GeneratorFamily {
 public:
  struct Generator {
    std::string name;
    PartialInjection map;
  };

  explicit GeneratorFamily(DiscreteSpace space) : space_(space) {}

  void add(std::string name, PartialInjection g);

  const DiscreteSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return generators_.size(); }
  const Generator& operator[](std::size_t i) const { return generators_[i]; }
  std::optional<std::size_t> index_of(const std::string& name) const;
  /// Throws on an unknown name.
  const PartialInjection& find(const std::string& name) const;

  auto begin() const { return generators_.begin(); }
  auto end() const { return generators_.end(); }

 private:
  DiscreteSpace space_;
  std::vector<Generator> generators_;
};

struct Letter {
  std::string generator;
  int exponent = 1;  // +1 or -1

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// g_1^{e_1} g_2^{e_2} ... g_k^{e_k}, acting right to left.
struct Word {
  std::vector<Letter> letters;

  std::size_t length() const noexcept { return letters.size(); }
  friend bool operator==(const Word&, const Word&) = default;
};

/// Renders "a*b^-1"; the empty word renders as "e".
std::string to_string(const Word& w);

PartialInjection evaluate_word(const GeneratorFamily& family, const Word& w);

/// Free reduction: cancels adjacent g g^-1 pairs until none remain.
Word reduce(const Word& w);

struct OrbitPartition {
  /// Smallest cell index of the class containing each cell.
  std::vector<std::size_t> representative;
  /// Classes in increasing order of representative, members ascending.
  std::vector<std::vector<std::size_t>> classes;
};

OrbitPartition orbits(const GeneratorFamily& family);
CellSet saturate(const GeneratorFamily& family, const CellSet& s);
bool is_ergodic_finite(const GeneratorFamily& family);

struct TreeingEntry {
  /// Letter codes left to right: 2*generator + (1 if inverse).
  std::vector<std::uint16_t> code;
  Measure fixed_measure;
  Measure domain_measure;
};

struct TreeingDiagnostics {
  /// Sorted by fixed-point measure (descending), then length, then code.
  std::vector<TreeingEntry> entries;
  std::size_t max_length = 0;
  /// Longest length fully enumerated.
  std::size_t complete_length = 0;
  /// True when the word cap stopped the enumeration early.
  bool truncated = false;
  /// Shortest length with a positive-measure fixed-point set, if found.
  std::optional<std::size_t> girth;

  Word word(const GeneratorFamily& family, std::size_t entry) const;
};

inline constexpr std::size_t kTreeingWordCap = 200000;

/// Enumerates nontrivial reduced words up to `max_length` letters
/// (breadth-first by length) and records the measure of each word's
/// fixed-point set. Words whose domain is empty are recorded but not
/// extended: every extension has empty domain too.
TreeingDiagnostics treeing_diagnostics(const GeneratorFamily& family,
                                       std::size_t max_length,
                                       std::size_t word_cap = kTreeingWordCap);

}  // namespace fkdet
