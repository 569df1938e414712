#pragma once
// Exact group arithmetic for two backends: finite groups given by a
// multiplication table, and finitely generated abelian groups Z^r + Z_d1 + ...
// with d1 | d2 | ... . Elements of a table group are encoded as {index};
// elements of an abelian group as their coordinate vector.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsm/linalg.hpp"

namespace bsm {

using linalg::Int;

/// Raised when a decision procedure is asked about a group combination its
/// backends cannot decide exactly.
class UnsupportedBackend : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Element {
  std::vector<Int> c;

  Element() = default;
  explicit Element(std::vector<Int> coords) : c(std::move(coords)) {}
  static Element index(Int i) { return Element({i}); }

  auto operator<=>(const Element&) const = default;
  bool operator==(const Element&) const = default;

  std::string str() const {
    std::ostringstream os;
    if (c.size() == 1) {
      os << c[0];
      return os.str();
    }
    os << '(';
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ')';
    return os.str();
  }
};

enum class GroupKind { FiniteTable, FgAbelian };

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group {
 public:
  using Table = std::vector<std::vector<Int>>;

  /// Validates the table eagerly: shape, identity, inverses, and associativity
  /// (every triple for n <= 64, 10 n^2 sampled triples beyond).
  static GroupPtr finite_table(Table table) {
    const std::size_t n = table.size();
    if (n == 0) throw std::invalid_argument("group table is empty");
    for (std::size_t i = 0; i < n; ++i) {
      if (table[i].size() != n)
        throw std::invalid_argument("group table row " + std::to_string(i) + " has wrong length");
      for (Int v : table[i])
        if (v < 0 || static_cast<std::size_t>(v) >= n)
          throw std::invalid_argument("group table entry out of range in row " + std::to_string(i));
    }
    auto g = std::shared_ptr<Group>(new Group());
    g->kind_ = GroupKind::FiniteTable;
    g->table_ = std::move(table);
    std::optional<Int> id;
    for (std::size_t e = 0; e < n && !id; ++e) {
      bool ok = true;
      for (std::size_t x = 0; x < n && ok; ++x)
        ok = g->table_[e][x] == static_cast<Int>(x) && g->table_[x][e] == static_cast<Int>(x);
      if (ok) id = static_cast<Int>(e);
    }
    if (!id) throw std::invalid_argument("group table has no identity");
    g->identity_index_ = *id;
    g->inverse_.assign(n, -1);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y)
        if (g->table_[x][y] == *id && g->table_[y][x] == *id) {
          g->inverse_[x] = static_cast<Int>(y);
          break;
        }
      if (g->inverse_[x] < 0)
        throw std::invalid_argument("element " + std::to_string(x) + " has no inverse");
    }
    auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
      const auto& t = g->table_;
      if (t[t[a][b]][c] != t[a][t[b][c]])
        throw std::invalid_argument("group table is not associative at (" + std::to_string(a) + "," +
                                    std::to_string(b) + "," + std::to_string(c) + ")");
    };
    if (n <= 64) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c) assoc(a, b, c);
    } else {
      std::mt19937_64 rng(0x5eed);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t k = 0; k < 10 * n * n; ++k) assoc(pick(rng), pick(rng), pick(rng));
    }
    g->abelian_ = true;
    for (std::size_t a = 0; a < n && g->abelian_; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (g->table_[a][b] != g->table_[b][a]) {
          g->abelian_ = false;
          break;
        }
    g->init_finite();
    return g;
  }

  static GroupPtr fg_abelian(int free_rank, std::vector<Int> torsion) {
    if (free_rank < 0) throw std::invalid_argument("free rank must be non-negative");
    for (std::size_t i = 0; i < torsion.size(); ++i) {
      if (torsion[i] < 2) throw std::invalid_argument("torsion divisors must be >= 2");
      if (i > 0 && torsion[i] % torsion[i - 1] != 0)
        throw std::invalid_argument("torsion divisors must form a divisor chain");
    }
    auto g = std::shared_ptr<Group>(new Group());
    g->kind_ = GroupKind::FgAbelian;
    g->free_rank_ = free_rank;
    g->torsion_ = std::move(torsion);
    g->abelian_ = true;
    if (free_rank == 0)
      g->init_finite();
    else
      g->init_abelian_gens();
    return g;
  }

  static GroupPtr trivial() { return fg_abelian(0, {}); }
  static GroupPtr cyclic(Int n) { return n == 1 ? trivial() : fg_abelian(0, {n}); }
  static GroupPtr free_abelian(int r) { return fg_abelian(r, {}); }

  /// S3 as permutations of {0,1,2} in lexicographic order:
  /// 0=id, 1=(1 2), 2=(0 1), 3=(0 1 2), 4=(0 2 1), 5=(0 2).
  static GroupPtr symmetric3() {
    std::vector<std::vector<int>> perms;
    std::vector<int> p{0, 1, 2};
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    Table t(6, std::vector<Int>(6));
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) {
        std::vector<int> ab(3);
        for (int i = 0; i < 3; ++i) ab[i] = perms[a][perms[b][i]];
        t[a][b] = std::find(perms.begin(), perms.end(), ab) - perms.begin();
      }
    return finite_table(std::move(t));
  }

  GroupKind kind() const { return kind_; }
  bool is_finite() const { return finite_; }
  bool is_abelian() const { return abelian_; }
  /// Number of elements; nullopt for infinite groups.
  std::optional<std::size_t> order() const {
    if (!finite_) return std::nullopt;
    return elements_.size();
  }
  int free_rank() const { return free_rank_; }
  const std::vector<Int>& torsion() const { return torsion_; }
  const Table& table() const { return table_; }

  /// Coordinate count of abelian elements.
  std::size_t rank() const { return static_cast<std::size_t>(free_rank_) + torsion_.size(); }
  /// Modulus of an abelian coordinate: 0 for free coordinates.
  Int modulus(std::size_t coord) const {
    return coord < static_cast<std::size_t>(free_rank_) ? 0 : torsion_[coord - free_rank_];
  }

  Element identity() const {
    if (kind_ == GroupKind::FiniteTable) return Element::index(identity_index_);
    return Element(std::vector<Int>(rank(), 0));
  }

  bool contains(const Element& x) const {
    if (kind_ == GroupKind::FiniteTable)
      return x.c.size() == 1 && x.c[0] >= 0 && static_cast<std::size_t>(x.c[0]) < table_.size();
    if (x.c.size() != rank()) return false;
    for (std::size_t i = free_rank_; i < rank(); ++i)
      if (x.c[i] < 0 || x.c[i] >= modulus(i)) return false;
    return true;
  }

  /// Reduces torsion coordinates into [0, d).
  Element canonical(Element x) const {
    if (kind_ == GroupKind::FgAbelian)
      for (std::size_t i = free_rank_; i < x.c.size() && i < rank(); ++i)
        x.c[i] = linalg::reduce(x.c[i], modulus(i));
    return x;
  }

  Element mul(const Element& a, const Element& b) const {
    if (kind_ == GroupKind::FiniteTable) return Element::index(table_[a.c[0]][b.c[0]]);
    Element r{std::vector<Int>(rank())};
    for (std::size_t i = 0; i < rank(); ++i) r.c[i] = linalg::reduce(linalg::add(a.c[i], b.c[i]), modulus(i));
    return r;
  }

  Element inv(const Element& a) const {
    if (kind_ == GroupKind::FiniteTable) return Element::index(inverse_[a.c[0]]);
    Element r{std::vector<Int>(rank())};
    for (std::size_t i = 0; i < rank(); ++i) r.c[i] = linalg::reduce(-a.c[i], modulus(i));
    return r;
  }

  Element pow(const Element& a, Int n) const {
    if (kind_ == GroupKind::FgAbelian) {
      Element r{std::vector<Int>(rank())};
      for (std::size_t i = 0; i < rank(); ++i) r.c[i] = linalg::reduce(linalg::mul(a.c[i], n), modulus(i));
      return r;
    }
    Element base = n < 0 ? inv(a) : a;
    Int e = n < 0 ? -n : n;
    Element r = identity();
    while (e > 0) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

  Element conj(const Element& g, const Element& x) const { return mul(mul(g, x), inv(g)); }

  /// Finite groups only: all elements in canonical order.
  const std::vector<Element>& elements() const {
    if (!finite_) throw std::logic_error("elements() on an infinite group");
    return elements_;
  }

  std::size_t index_of(const Element& x) const {
    if (kind_ == GroupKind::FiniteTable) return static_cast<std::size_t>(x.c[0]);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < rank(); ++i) idx = idx * static_cast<std::size_t>(modulus(i)) + static_cast<std::size_t>(x.c[i]);
    return idx;
  }

  std::size_t element_order(const Element& x) const {
    if (!finite_) throw std::logic_error("element_order() on an infinite group");
    std::size_t k = 1;
    for (Element y = x; y != identity(); y = mul(y, x)) ++k;
    return k;
  }

  /// Finite groups: greedy generating set in element order. Abelian groups:
  /// the canonical unit vectors.
  const std::vector<Element>& generators() const { return generators_; }

  std::vector<Element> center() const {
    std::vector<Element> z;
    for (const auto& x : elements()) {
      bool central = true;
      for (const auto& g : generators_)
        if (mul(x, g) != mul(g, x)) {
          central = false;
          break;
        }
      if (central) z.push_back(x);
    }
    return z;
  }

  bool same_invariants(const Group& o) const {
    return kind_ == GroupKind::FgAbelian && o.kind_ == GroupKind::FgAbelian && free_rank_ == o.free_rank_ &&
           torsion_ == o.torsion_;
  }

  bool operator==(const Group& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ == GroupKind::FiniteTable) return table_ == o.table_;
    return free_rank_ == o.free_rank_ && torsion_ == o.torsion_;
  }

  std::string describe() const {
    std::ostringstream os;
    if (kind_ == GroupKind::FiniteTable) {
      os << "FiniteTable(" << table_.size() << (abelian_ ? ", abelian" : "") << ")";
      return os.str();
    }
    if (rank() == 0) return "1";
    bool first = true;
    if (free_rank_ > 0) {
      os << "Z";
      if (free_rank_ > 1) os << "^" << free_rank_;
      first = false;
    }
    for (Int d : torsion_) {
      os << (first ? "" : " x ") << "Z" << d;
      first = false;
    }
    return os.str();
  }

 private:
  Group() = default;

  void init_finite() {
    finite_ = true;
    if (kind_ == GroupKind::FiniteTable) {
      for (std::size_t i = 0; i < table_.size(); ++i) elements_.push_back(Element::index(static_cast<Int>(i)));
      // greedy generating set
      std::set<Int> span{identity_index_};
      for (std::size_t i = 0; i < table_.size(); ++i) {
        if (span.count(static_cast<Int>(i))) continue;
        generators_.push_back(Element::index(static_cast<Int>(i)));
        std::vector<Int> frontier(span.begin(), span.end());
        while (!frontier.empty()) {
          std::vector<Int> next;
          for (Int x : frontier)
            for (const auto& g : generators_) {
              Int y = table_[x][g.c[0]];
              if (span.insert(y).second) next.push_back(y);
            }
          frontier = std::move(next);
        }
      }
    } else {
      std::vector<Int> cur(rank(), 0);
      std::size_t total = 1;
      for (Int d : torsion_) total *= static_cast<std::size_t>(d);
      for (std::size_t k = 0; k < total; ++k) {
        elements_.emplace_back(cur);
        for (std::size_t i = rank(); i-- > 0;) {
          if (++cur[i] < torsion_[i]) break;
          cur[i] = 0;
        }
      }
    }
    if (kind_ == GroupKind::FgAbelian) init_abelian_gens();
  }

  void init_abelian_gens() {
    generators_.clear();
    for (std::size_t i = 0; i < rank(); ++i) {
      std::vector<Int> e(rank(), 0);
      e[i] = 1;
      generators_.emplace_back(std::move(e));
    }
  }

  GroupKind kind_ = GroupKind::FgAbelian;
  Table table_;
  Int identity_index_ = 0;
  std::vector<Int> inverse_;
  int free_rank_ = 0;
  std::vector<Int> torsion_;
  bool abelian_ = true;
  bool finite_ = false;
  std::vector<Element> elements_;
  std::vector<Element> generators_;
};

/// A homomorphism. For a table source `images` holds the image of every
/// element; for an abelian source it holds the images of the canonical
/// generators (the columns of the matrix when the target is abelian).
/// Construction only checks shape; `check()` reports multiplicativity issues.
class Hom {
 public:
  Hom() = default;
  Hom(GroupPtr source, GroupPtr target, std::vector<Element> images)
      : src_(std::move(source)), dst_(std::move(target)), images_(std::move(images)) {
    std::size_t want = src_->kind() == GroupKind::FiniteTable ? src_->table().size() : src_->rank();
    if (images_.size() != want)
      throw std::invalid_argument("hom has " + std::to_string(images_.size()) + " images, expected " +
                                  std::to_string(want));
    for (auto& im : images_) im = dst_->canonical(im);
  }

  static Hom identity(const GroupPtr& g) {
    return from_function(g, g, [](const Element& x) { return x; });
  }

  template <class F>
  static Hom from_function(const GroupPtr& source, const GroupPtr& target, F&& f) {
    std::vector<Element> imgs;
    if (source->kind() == GroupKind::FiniteTable)
      for (const auto& x : source->elements()) imgs.push_back(f(x));
    else
      for (const auto& g : source->generators()) imgs.push_back(f(g));
    return Hom(source, target, std::move(imgs));
  }

  /// Abelian -> abelian, matrix[row][col]: row = target coordinate, col =
  /// source generator.
  static Hom from_matrix(const GroupPtr& source, const GroupPtr& target, const linalg::Mat& m) {
    if (source->kind() != GroupKind::FgAbelian || target->kind() != GroupKind::FgAbelian)
      throw std::invalid_argument("matrix homs need abelian source and target");
    if (m.size() != target->rank()) throw std::invalid_argument("matrix row count must equal target rank");
    std::vector<Element> imgs(source->rank(), Element(std::vector<Int>(target->rank(), 0)));
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (m[r].size() != source->rank()) throw std::invalid_argument("matrix column count must equal source rank");
      for (std::size_t c = 0; c < source->rank(); ++c) imgs[c].c[r] = m[r][c];
    }
    return Hom(source, target, std::move(imgs));
  }

  const GroupPtr& source() const { return src_; }
  const GroupPtr& target() const { return dst_; }
  const std::vector<Element>& images() const { return images_; }

  linalg::Mat matrix() const {
    if (src_->kind() != GroupKind::FgAbelian || dst_->kind() != GroupKind::FgAbelian)
      throw std::logic_error("matrix() needs abelian source and target");
    linalg::Mat m(dst_->rank(), linalg::Vec(src_->rank(), 0));
    for (std::size_t c = 0; c < src_->rank(); ++c)
      for (std::size_t r = 0; r < dst_->rank(); ++r) m[r][c] = images_[c].c[r];
    return m;
  }

  Element operator()(const Element& x) const {
    if (!src_->contains(x)) throw std::invalid_argument("element " + x.str() + " is not in the hom's source");
    if (src_->kind() == GroupKind::FiniteTable) return images_[static_cast<std::size_t>(x.c[0])];
    Element r = dst_->identity();
    for (std::size_t i = 0; i < x.c.size(); ++i)
      if (x.c[i] != 0) r = dst_->mul(r, dst_->pow(images_[i], x.c[i]));
    return r;
  }

  /// Every violated homomorphism law, empty when valid.
  std::vector<std::string> check() const {
    std::vector<std::string> issues;
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (!dst_->contains(images_[i])) issues.push_back("image " + std::to_string(i) + " is not in the target");
    if (!issues.empty()) return issues;
    if (src_->kind() == GroupKind::FiniteTable) {
      const std::size_t n = src_->table().size();
      auto test = [&](std::size_t a, std::size_t b) {
        Element ab = src_->mul(Element::index(static_cast<Int>(a)), Element::index(static_cast<Int>(b)));
        if ((*this)(ab) != dst_->mul(images_[a], images_[b]))
          issues.push_back("not multiplicative at pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
      };
      if (n <= 64) {
        for (std::size_t a = 0; a < n && issues.size() < 8; ++a)
          for (std::size_t b = 0; b < n && issues.size() < 8; ++b) test(a, b);
      } else {
        std::mt19937_64 rng(0x5eed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t k = 0; k < 10 * n * n && issues.size() < 8; ++k) test(pick(rng), pick(rng));
      }
      if ((*this)(src_->identity()) != dst_->identity()) issues.push_back("identity not mapped to identity");
    } else {
      for (std::size_t i = 0; i < images_.size(); ++i) {
        for (std::size_t j = i + 1; j < images_.size(); ++j)
          if (dst_->mul(images_[i], images_[j]) != dst_->mul(images_[j], images_[i]))
            issues.push_back("images of generators " + std::to_string(i) + " and " + std::to_string(j) +
                             " do not commute");
        Int d = src_->modulus(i);
        if (d != 0 && dst_->pow(images_[i], d) != dst_->identity())
          issues.push_back("image of torsion generator " + std::to_string(i) + " has order not dividing " +
                           std::to_string(d));
      }
    }
    return issues;
  }

  bool is_bijective() const;

  bool operator==(const Hom& o) const {
    return images_ == o.images_ && *src_ == *o.src_ && *dst_ == *o.dst_;
  }
  auto operator<=>(const Hom& o) const { return images_ <=> o.images_; }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < images_.size(); ++i) os << (i ? " " : "") << images_[i].str();
    os << ']';
    return os.str();
  }

 private:
  GroupPtr src_, dst_;
  std::vector<Element> images_;
};

inline Element hom_apply(const Hom& f, const Element& x) { return f(x); }

/// f o g.
inline Hom hom_compose(const Hom& f, const Hom& g) {
  if (!(*g.target() == *f.source()))
    throw std::invalid_argument("cannot compose: target " + g.target()->describe() + " != source " +
                                f.source()->describe());
  std::vector<Element> imgs;
  imgs.reserve(g.images().size());
  for (const auto& y : g.images()) imgs.push_back(f(y));
  return Hom(g.source(), f.target(), std::move(imgs));
}

/// x -> g x g^-1.
inline Hom conjugation_aut(const GroupPtr& group, const Element& g) {
  if (!group->contains(g)) throw std::invalid_argument("conjugating element " + g.str() + " not in group");
  if (group->is_abelian()) return Hom::identity(group);
  return Hom::from_function(group, group, [&](const Element& x) { return group->conj(g, x); });
}

inline bool Hom::is_bijective() const {
  if (src_->is_finite() != dst_->is_finite()) return false;
  if (src_->is_finite()) {
    if (*src_->order() != *dst_->order()) return false;
    std::set<Element> seen;
    for (const auto& x : src_->elements())
      if (!seen.insert((*this)(x)).second) return false;
    return true;
  }
  if (!src_->same_invariants(*dst_)) return false;
  // Finitely generated abelian groups are Hopfian: with equal invariants a
  // surjection is an isomorphism. Surjective iff images plus target
  // relations span Z^m.
  const std::size_t m = dst_->rank();
  linalg::Mat rows;
  for (const auto& im : images_) rows.push_back(im.c);
  for (std::size_t i = 0; i < m; ++i)
    if (dst_->modulus(i) != 0) {
      linalg::Vec r(m, 0);
      r[i] = dst_->modulus(i);
      rows.push_back(r);
    }
  return linalg::spans_unimodular(std::move(rows), m);
}

// ---------------------------------------------------------------------------
// Constrained isomorphism solving

/// a o left == right o a, with left an endomorphism of the source group and
/// right an endomorphism of the target group.
struct Intertwining {
  Hom left;
  Hom right;
};

/// a(from) == to.
struct ValuePin {
  Element from;
  Element to;
};

struct ConstraintSet {
  std::vector<Intertwining> intertwine;
  std::vector<ValuePin> pins;
};

struct SearchOptions {
  /// Entry bound for free -> free matrix entries of infinite abelian isos.
  Int max_entry = 8;
};

struct IsoSolutionSet {
  std::vector<Hom> isos;  // canonical (lexicographic) order
  bool complete = true;
};

namespace detail {

inline bool satisfies(const Hom& a, const ConstraintSet& cs) {
  for (const auto& pin : cs.pins)
    if (a(pin.from) != pin.to) return false;
  for (const auto& tw : cs.intertwine)
    for (const auto& g : a.source()->generators())
      if (a(tw.left(g)) != tw.right(a(g))) return false;
  return true;
}

inline IsoSolutionSet solve_finite(const GroupPtr& g1, const GroupPtr& g2, const ConstraintSet& cs) {
  IsoSolutionSet out;
  if (*g1->order() != *g2->order()) return out;
  for (const auto& pin : cs.pins)
    if (g1->element_order(pin.from) != g2->element_order(pin.to)) return out;
  // Generators of the source as words: BFS tree over the table.
  const auto& gens = g1->generators();
  const auto& els1 = g1->elements();
  std::vector<std::vector<Element>> candidates;
  for (const auto& s : gens) {
    std::vector<Element> c;
    auto ord = g1->element_order(s);
    for (const auto& y : g2->elements())
      if (g2->element_order(y) == ord) c.push_back(y);
    candidates.push_back(std::move(c));
  }
  std::vector<Element> choice(gens.size());
  std::vector<std::optional<Element>> map(els1.size());
  auto extend = [&]() -> std::optional<Hom> {
    std::fill(map.begin(), map.end(), std::nullopt);
    map[g1->index_of(g1->identity())] = g2->identity();
    std::vector<Element> frontier{g1->identity()};
    while (!frontier.empty()) {
      std::vector<Element> next;
      for (const auto& x : frontier)
        for (std::size_t k = 0; k < gens.size(); ++k) {
          Element y = g1->mul(x, gens[k]);
          Element fy = g2->mul(*map[g1->index_of(x)], choice[k]);
          auto& slot = map[g1->index_of(y)];
          if (!slot) {
            slot = fy;
            next.push_back(y);
          } else if (*slot != fy) {
            return std::nullopt;
          }
        }
      frontier = std::move(next);
    }
    std::set<Element> seen;
    for (const auto& v : map)
      if (!seen.insert(*v).second) return std::nullopt;
    Hom h = Hom::from_function(g1, g2, [&](const Element& x) { return *map[g1->index_of(x)]; });
    // table-source homs record all images; abelian sources only generator
    // images, so multiplicativity must be confirmed on the full map.
    for (const auto& x : els1)
      if (h(x) != *map[g1->index_of(x)]) return std::nullopt;
    return h;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == gens.size()) {
      if (auto h = extend(); h && satisfies(*h, cs)) out.isos.push_back(std::move(*h));
      return;
    }
    for (const auto& y : candidates[k]) {
      choice[k] = y;
      rec(k + 1);
    }
  };
  rec(0);
  std::sort(out.isos.begin(), out.isos.end());
  out.isos.erase(std::unique(out.isos.begin(), out.isos.end()), out.isos.end());
  return out;
}

/// Both groups abelian, at least one infinite. Unknowns are the entries of
/// the matrix a[row][col], flattened as row * n1 + col.
inline IsoSolutionSet solve_lattice(const GroupPtr& g1, const GroupPtr& g2, const ConstraintSet& cs,
                                    const SearchOptions& opt) {
  IsoSolutionSet out;
  if (!g1->same_invariants(*g2)) return out;
  const std::size_t n1 = g1->rank(), n2 = g2->rank();
  auto var = [&](std::size_t row, std::size_t col) { return row * n1 + col; };
  linalg::LinearSystem sys;
  sys.nvars = n1 * n2;
  linalg::Vec lo(sys.nvars), hi(sys.nvars);
  for (std::size_t r = 0; r < n2; ++r)
    for (std::size_t c = 0; c < n1; ++c) {
      Int mr = g2->modulus(r), dc = g1->modulus(c);
      if (mr == 0) {
        lo[var(r, c)] = dc == 0 ? -opt.max_entry : 0;
        hi[var(r, c)] = dc == 0 ? opt.max_entry : 0;
      } else {
        lo[var(r, c)] = 0;
        hi[var(r, c)] = mr - 1;
        if (dc != 0) {
          linalg::Vec co(sys.nvars, 0);
          co[var(r, c)] = dc;
          sys.add(co, 0, mr);
        }
      }
    }
  for (const auto& tw : cs.intertwine) {
    auto f = tw.left.matrix();   // n1 x n1
    auto g = tw.right.matrix();  // n2 x n2
    for (std::size_t r = 0; r < n2; ++r)
      for (std::size_t c = 0; c < n1; ++c) {
        linalg::Vec co(sys.nvars, 0);
        for (std::size_t k = 0; k < n1; ++k) co[var(r, k)] = linalg::add(co[var(r, k)], f[k][c]);
        for (std::size_t k = 0; k < n2; ++k) co[var(k, c)] = linalg::sub(co[var(k, c)], g[r][k]);
        sys.add(co, 0, g2->modulus(r));
      }
  }
  for (const auto& pin : cs.pins)
    for (std::size_t r = 0; r < n2; ++r) {
      linalg::Vec co(sys.nvars, 0);
      for (std::size_t c = 0; c < n1; ++c) co[var(r, c)] = pin.from.c[c];
      sys.add(co, pin.to.c[r], g2->modulus(r));
    }
  auto lat = linalg::solve(sys);
  if (!lat) return out;
  bool free_direction = false;
  for (const auto& b : lat->basis)
    for (std::size_t r = 0; r < static_cast<std::size_t>(g2->free_rank()); ++r)
      for (std::size_t c = 0; c < static_cast<std::size_t>(g1->free_rank()); ++c)
        if (b[var(r, c)] != 0) free_direction = true;
  out.complete = !free_direction || (g1->free_rank() <= 1 && opt.max_entry >= 1);
  linalg::enumerate_box(*lat, lo, hi, [&](const linalg::Vec& x) {
    linalg::Mat m(n2, linalg::Vec(n1));
    for (std::size_t r = 0; r < n2; ++r)
      for (std::size_t c = 0; c < n1; ++c) m[r][c] = x[var(r, c)];
    Hom h = Hom::from_matrix(g1, g2, m);
    if (h.is_bijective()) out.isos.push_back(std::move(h));
    return true;
  });
  std::sort(out.isos.begin(), out.isos.end());
  return out;
}

}  // namespace detail

/// All isomorphisms g1 -> g2 satisfying the constraints. Exact for finite
/// groups; for infinite abelian groups the free part is enumerated up to
/// `opt.max_entry` and `complete` reports whether that is provably all.
inline IsoSolutionSet solve_isomorphisms(const GroupPtr& g1, const GroupPtr& g2, const ConstraintSet& cs,
                                         const SearchOptions& opt = {}) {
  for (const auto& pin : cs.pins)
    if (!g1->contains(pin.from) || !g2->contains(pin.to))
      throw std::invalid_argument("value pin " + pin.from.str() + " -> " + pin.to.str() + " outside the groups");
  if (g1->is_finite() && g2->is_finite()) return detail::solve_finite(g1, g2, cs);
  if (g1->is_finite() != g2->is_finite()) return {};
  if (g1->kind() == GroupKind::FgAbelian && g2->kind() == GroupKind::FgAbelian)
    return detail::solve_lattice(g1, g2, cs, opt);
  throw UnsupportedBackend("no isomorphism backend for " + g1->describe() + " -> " + g2->describe());
}

/// Inverse of a bijective hom.
inline Hom inverse(const Hom& f) {
  const auto& s = f.source();
  const auto& t = f.target();
  if (s->is_finite() && t->is_finite()) {
    std::map<Element, Element> back;
    for (const auto& x : s->elements()) back[f(x)] = x;
    if (back.size() != s->elements().size() || *s->order() != *t->order())
      throw std::invalid_argument("inverse of a non-bijective hom");
    return Hom::from_function(t, s, [&](const Element& y) { return back.at(y); });
  }
  ConstraintSet cs;
  for (const auto& g : s->generators()) cs.pins.push_back({f(g), g});
  SearchOptions opt;
  opt.max_entry = Int{1} << 40;
  auto sol = solve_isomorphisms(t, s, cs, opt);
  if (sol.isos.size() != 1) throw std::invalid_argument("inverse of a non-bijective hom");
  return sol.isos.front();
}

// ---------------------------------------------------------------------------

struct AutDescription {
  bool finite = true;
  bool complete = true;
  std::vector<Hom> elements;  // all automorphisms (bounded when infinite)
  /// table[i][j] = index of elements[i] o elements[j]; finite groups only.
  std::vector<std::vector<std::size_t>> table;
  std::vector<bool> inner;
  /// Infinite abelian groups: sign flips and elementary transvections of the
  /// free part.
  std::vector<Hom> generators;
};

inline AutDescription automorphism_group(const GroupPtr& g, const SearchOptions& opt = {}) {
  AutDescription d;
  auto sol = solve_isomorphisms(g, g, {}, opt);
  d.elements = sol.isos;
  d.complete = sol.complete;
  d.finite = sol.complete;
  std::set<Hom> inner;
  if (g->is_finite())
    for (const auto& x : g->elements()) inner.insert(conjugation_aut(g, x));
  else
    inner.insert(Hom::identity(g));
  for (const auto& a : d.elements) d.inner.push_back(inner.count(a) > 0);
  if (d.finite) {
    std::map<Hom, std::size_t> idx;
    for (std::size_t i = 0; i < d.elements.size(); ++i) idx[d.elements[i]] = i;
    d.table.assign(d.elements.size(), std::vector<std::size_t>(d.elements.size()));
    for (std::size_t i = 0; i < d.elements.size(); ++i)
      for (std::size_t j = 0; j < d.elements.size(); ++j)
        d.table[i][j] = idx.at(hom_compose(d.elements[i], d.elements[j]));
  }
  if (!g->is_finite()) {
    const std::size_t n = g->rank();
    const std::size_t r = static_cast<std::size_t>(g->free_rank());
    auto unit = [&]() {
      linalg::Mat m(n, linalg::Vec(n, 0));
      for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
      return m;
    };
    auto flip = unit();
    flip[0][0] = -1;
    d.generators.push_back(Hom::from_matrix(g, g, flip));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (i != j) {
          auto t = unit();
          t[i][j] = 1;
          d.generators.push_back(Hom::from_matrix(g, g, t));
        }
  }
  return d;
}

}  // namespace bsm
