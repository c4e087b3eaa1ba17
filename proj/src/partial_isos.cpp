#include "fkdet/partial_isos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fkdet/error.hpp"

namespace fkdet {

namespace {

std::size_t cut_index(const DiscreteSpace& space, double t) {
  const double scaled = t * static_cast<double>(space.size());
  const double nearest = std::round(scaled);
  if (!(t > 0.0 && t < 1.0) || std::abs(scaled - nearest) > 1e-9) {
    std::ostringstream msg;
    msg << "interval exchange cut " << t << " is not an interior multiple of 1/"
        << space.size();
    fail(msg.str());
  }
  return static_cast<std::size_t>(nearest);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

// ---------------------------------------------------------------------------
// PartialInjection

PartialInjection::PartialInjection(DiscreteSpace space)
    : space_(space), targets_(space.size(), kUndefined) {}

PartialInjection::PartialInjection(DiscreteSpace space,
                                   std::vector<std::int32_t> targets)
    : space_(space), targets_(std::move(targets)) {
  if (targets_.size() != space_.size()) fail("target table has wrong length");
  std::vector<bool> hit(space_.size(), false);
  for (std::size_t x = 0; x < targets_.size(); ++x) {
    const std::int32_t t = targets_[x];
    if (t == kUndefined) continue;
    if (t < 0 || static_cast<std::size_t>(t) >= space_.size()) {
      std::ostringstream msg;
      msg << "target " << t << " of cell " << x << " is out of range";
      fail(msg.str());
    }
    if (hit[static_cast<std::size_t>(t)]) {
      std::ostringstream msg;
      msg << "not injective: cell " << t << " is hit twice";
      fail(msg.str());
    }
    hit[static_cast<std::size_t>(t)] = true;
    ++domain_size_;
  }
}

PartialInjection PartialInjection::identity(DiscreteSpace space) {
  return make_rotation(space, 0);
}

CellSet PartialInjection::domain() const {
  CellSet s = CellSet::empty(space_);
  for (std::size_t x = 0; x < targets_.size(); ++x)
    if (targets_[x] != kUndefined) s.insert(x);
  return s;
}

CellSet PartialInjection::range() const {
  CellSet s = CellSet::empty(space_);
  for (std::int32_t t : targets_)
    if (t != kUndefined) s.insert(static_cast<std::size_t>(t));
  return s;
}

PartialInjection make_rotation(DiscreteSpace space, std::int64_t p) {
  const auto n = static_cast<std::int64_t>(space.size());
  const std::int64_t shift = ((p % n) + n) % n;
  std::vector<std::int32_t> t(space.size());
  for (std::int64_t k = 0; k < n; ++k)
    t[static_cast<std::size_t>(k)] = static_cast<std::int32_t>((k + shift) % n);
  return PartialInjection(space, std::move(t));
}

PartialInjection make_table(
    DiscreteSpace space,
    std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<std::int32_t> t(space.size(), PartialInjection::kUndefined);
  std::vector<bool> hit(space.size(), false);
  for (const auto& [src, dst] : pairs) {
    if (src >= space.size() || dst >= space.size()) {
      std::ostringstream msg;
      msg << "pair (" << src << ", " << dst << ") out of range for "
          << space.size() << " cells";
      fail(msg.str());
    }
    if (t[src] != PartialInjection::kUndefined) {
      std::ostringstream msg;
      msg << "not a function: cell " << src << " has two targets";
      fail(msg.str());
    }
    if (hit[dst]) {
      std::ostringstream msg;
      msg << "not injective: cell " << dst << " is hit twice";
      fail(msg.str());
    }
    t[src] = static_cast<std::int32_t>(dst);
    hit[dst] = true;
  }
  return PartialInjection(space, std::move(t));
}

PartialInjection make_interval_exchange(DiscreteSpace space,
                                        std::span<const double> cuts,
                                        std::span<const std::size_t> order) {
  const std::size_t pieces = cuts.size() + 1;
  if (order.size() != pieces)
    fail("interval exchange needs one permutation entry per piece");
  std::vector<std::size_t> bounds{0};
  for (double c : cuts) bounds.push_back(cut_index(space, c));
  bounds.push_back(space.size());
  for (std::size_t j = 1; j < bounds.size(); ++j)
    if (bounds[j] <= bounds[j - 1])
      fail("interval exchange cuts must be strictly increasing");

  std::vector<bool> seen(pieces, false);
  for (std::size_t j : order) {
    if (j >= pieces || seen[j]) fail("interval exchange order is not a permutation");
    seen[j] = true;
  }

  std::vector<std::int32_t> t(space.size());
  std::size_t placed = 0;
  for (std::size_t j : order) {
    for (std::size_t k = bounds[j]; k < bounds[j + 1]; ++k)
      t[k] = static_cast<std::int32_t>(placed + (k - bounds[j]));
    placed += bounds[j + 1] - bounds[j];
  }
  return PartialInjection(space, std::move(t));
}

PartialInjection invert(const PartialInjection& g) {
  std::vector<std::int32_t> t(g.space().size(), PartialInjection::kUndefined);
  for (std::size_t x = 0; x < t.size(); ++x)
    if (g.defined_at(x)) t[g(x)] = static_cast<std::int32_t>(x);
  return PartialInjection(g.space(), std::move(t));
}

PartialInjection restrict(const PartialInjection& g, const CellSet& s) {
  require_same_space(g.space(), s.space(), "restrict");
  std::vector<std::int32_t> t(g.targets().begin(), g.targets().end());
  for (std::size_t x = 0; x < t.size(); ++x)
    if (!s.contains(x)) t[x] = PartialInjection::kUndefined;
  return PartialInjection(g.space(), std::move(t));
}

PartialInjection compose(const PartialInjection& g, const PartialInjection& h) {
  require_same_space(g.space(), h.space(), "compose");
  std::vector<std::int32_t> t(g.space().size(), PartialInjection::kUndefined);
  for (std::size_t x = 0; x < t.size(); ++x)
    if (h.defined_at(x) && g.defined_at(h(x))) t[x] = g.targets()[h(x)];
  return PartialInjection(g.space(), std::move(t));
}

CellSet fixed_point_set(const PartialInjection& g) {
  CellSet s = CellSet::empty(g.space());
  for (std::size_t x = 0; x < g.space().size(); ++x)
    if (g.defined_at(x) && g(x) == x) s.insert(x);
  return s;
}

// ---------------------------------------------------------------------------
// Families and words

void GeneratorFamily::add(std::string name, PartialInjection g) {
  require_same_space(space_, g.space(), "generator family");
  if (name.empty()) fail("generator names must be non-empty");
  if (index_of(name)) fail("duplicate generator name '" + name + "'");
  generators_.push_back({std::move(name), std::move(g)});
}

std::optional<std::size_t> GeneratorFamily::index_of(
    const std::string& name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].name == name) return i;
  return std::nullopt;
}

const PartialInjection& GeneratorFamily::find(const std::string& name) const {
  const auto i = index_of(name);
  if (!i) fail("unknown generator '" + name + "'");
  return generators_[*i].map;
}

std::string to_string(const Word& w) {
  if (w.letters.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) out += '*';
    out += w.letters[i].generator;
    if (w.letters[i].exponent < 0) out += "^-1";
  }
  return out;
}

PartialInjection evaluate_word(const GeneratorFamily& family, const Word& w) {
  PartialInjection acc = PartialInjection::identity(family.space());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    if (it->exponent != 1 && it->exponent != -1)
      fail("word exponents must be +1 or -1");
    const PartialInjection& g = family.find(it->generator);
    acc = it->exponent == 1 ? compose(g, acc) : compose(invert(g), acc);
  }
  return acc;
}

Word reduce(const Word& w) {
  Word out;
  for (const Letter& l : w.letters) {
    if (!out.letters.empty() && out.letters.back().generator == l.generator &&
        out.letters.back().exponent == -l.exponent) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbits

OrbitPartition orbits(const GeneratorFamily& family) {
  const std::size_t n = family.space().size();
  UnionFind uf(n);
  for (const auto& gen : family)
    for (std::size_t x = 0; x < n; ++x)
      if (gen.map.defined_at(x)) uf.unite(x, gen.map(x));

  OrbitPartition out;
  out.representative.assign(n, 0);
  std::vector<std::size_t> class_of_root(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t root = uf.find(x);
    if (class_of_root[root] == n) {
      class_of_root[root] = out.classes.size();
      out.classes.emplace_back();
    }
    // Cells are visited in increasing order, so the first member is the
    // smallest.
    auto& cls = out.classes[class_of_root[root]];
    cls.push_back(x);
    out.representative[x] = cls.front();
  }
  return out;
}

CellSet saturate(const GeneratorFamily& family, const CellSet& s) {
  require_same_space(family.space(), s.space(), "saturate");
  const OrbitPartition p = orbits(family);
  std::vector<bool> hit(family.space().size(), false);
  for (std::size_t x : s.members()) hit[p.representative[x]] = true;
  CellSet out = CellSet::empty(family.space());
  for (std::size_t x = 0; x < hit.size(); ++x)
    if (hit[p.representative[x]]) out.insert(x);
  return out;
}

bool is_ergodic_finite(const GeneratorFamily& family) {
  return orbits(family).classes.size() == 1;
}

// ---------------------------------------------------------------------------
// Treeing diagnostics

Word TreeingDiagnostics::word(const GeneratorFamily& family,
                              std::size_t entry) const {
  Word w;
  for (std::uint16_t c : entries.at(entry).code)
    w.letters.push_back({family[c / 2].name, (c % 2) ? -1 : 1});
  return w;
}

namespace {

struct WordSearch {
  const GeneratorFamily& family;
  std::vector<PartialInjection> letters;  // indexed by code
  std::size_t cap;
  TreeingDiagnostics& out;
  std::vector<std::uint16_t> code;        // code[0] is the outermost letter
  bool stopped = false;

  // Extends `current` (a word of code.size() letters) on the left until the
  // word reaches `target` letters.
  void extend(const PartialInjection& current, std::size_t target) {
    for (std::uint16_t c = 0; c < letters.size() && !stopped; ++c) {
      if (!code.empty() && (c ^ 1U) == code.front()) continue;  // g g^-1
      PartialInjection next = compose(letters[c], current);
      code.insert(code.begin(), c);
      if (code.size() == target) {
        record(next);
      } else if (next.domain_size() > 0) {
        extend(next, target);
      }
      code.erase(code.begin());
    }
  }

  void record(const PartialInjection& w) {
    if (out.entries.size() >= cap) {
      stopped = true;
      out.truncated = true;
      return;
    }
    out.entries.push_back({code, measure(fixed_point_set(w)), measure(w.domain())});
  }
};

}  // namespace

TreeingDiagnostics treeing_diagnostics(const GeneratorFamily& family,
                                       std::size_t max_length,
                                       std::size_t word_cap) {
  if (max_length < 1) fail("treeing diagnostics need max length >= 1");
  if (family.size() > 0x7fff) fail("too many generators");
  TreeingDiagnostics out;
  out.max_length = max_length;
  if (family.size() == 0) {
    out.complete_length = max_length;
    return out;
  }

  WordSearch search{family, {}, word_cap, out, {}, false};
  for (const auto& gen : family) {
    search.letters.push_back(gen.map);
    search.letters.push_back(invert(gen.map));
  }

  // Iterative deepening keeps memory at O(length * N) while still finishing
  // each length before starting the next.
  const PartialInjection id = PartialInjection::identity(family.space());
  for (std::size_t len = 1; len <= max_length && !search.stopped; ++len) {
    const std::size_t before = out.entries.size();
    search.extend(id, len);
    if (search.stopped) break;
    out.complete_length = len;
    const bool any_live = std::any_of(
        out.entries.begin() + static_cast<std::ptrdiff_t>(before),
        out.entries.end(),
        [](const TreeingEntry& e) { return e.domain_measure > 0; });
    if (!any_live) break;  // nothing left to extend
  }
  if (!search.stopped) out.complete_length = max_length;

  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const TreeingEntry& a, const TreeingEntry& b) {
                     if (a.fixed_measure != b.fixed_measure)
                       return a.fixed_measure > b.fixed_measure;
                     if (a.code.size() != b.code.size())
                       return a.code.size() < b.code.size();
                     return a.code < b.code;
                   });
  for (const TreeingEntry& e : out.entries) {
    if (e.fixed_measure > 0 && (!out.girth || e.code.size() < *out.girth))
      out.girth = e.code.size();
  }
  return out;
}

}  // namespace fkdet
