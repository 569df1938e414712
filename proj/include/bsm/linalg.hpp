#pragma once
// Exact integer linear algebra: echelon forms, affine solution lattices of
// congruence systems, bounded lattice-point enumeration and Smith invariants.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bsm::linalg {

using Int = std::int64_t;
using Vec = std::vector<Int>;
using Mat = std::vector<Vec>;

inline Int narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error("integer overflow in exact arithmetic");
  return static_cast<Int>(v);
}
inline Int add(Int a, Int b) { return narrow(static_cast<__int128>(a) + b); }
inline Int sub(Int a, Int b) { return narrow(static_cast<__int128>(a) - b); }
inline Int mul(Int a, Int b) { return narrow(static_cast<__int128>(a) * b); }

inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline Int ceil_div(Int a, Int b) { return -floor_div(-a, b); }

/// Least non-negative residue; modulus 0 means "no reduction".
inline Int reduce(Int a, Int m) {
  if (m == 0) return a;
  Int r = a % m;
  return r < 0 ? r + m : r;
}

inline Int gcd(Int a, Int b) {
  a = std::abs(a);
  b = std::abs(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// row_a += k * row_b
inline void axpy(Vec& a, const Vec& b, Int k) {
  if (k == 0) return;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = add(a[i], mul(k, b[i]));
}

/// Row echelon form over Z using unimodular row operations. Operations are
/// mirrored on `transform` (if non-null), which must have as many rows as `m`.
/// Returns pivot columns of the nonzero leading rows; pivots are positive and
/// entries above each pivot are reduced into [0, pivot).
inline std::vector<std::size_t> row_echelon(Mat& m, std::size_t ncols,
                                            Mat* transform = nullptr) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    std::swap(m[i], m[j]);
    if (transform) std::swap((*transform)[i], (*transform)[j]);
  };
  auto combine = [&](std::size_t dst, std::size_t src, Int k) {
    axpy(m[dst], m[src], k);
    if (transform) axpy((*transform)[dst], (*transform)[src], k);
  };
  for (std::size_t col = 0; col < ncols && row < m.size(); ++col) {
    while (true) {
      std::size_t best = m.size();
      for (std::size_t r = row; r < m.size(); ++r)
        if (m[r][col] != 0 && (best == m.size() || std::abs(m[r][col]) < std::abs(m[best][col])))
          best = r;
      if (best == m.size()) break;
      swap_rows(row, best);
      bool done = true;
      for (std::size_t r = row + 1; r < m.size(); ++r) {
        if (m[r][col] == 0) continue;
        combine(r, row, -floor_div(m[r][col], m[row][col]));
        if (m[r][col] != 0) done = false;
      }
      if (done) break;
    }
    if (m[row][col] == 0) continue;
    if (m[row][col] < 0) {
      for (auto& x : m[row]) x = -x;
      if (transform)
        for (auto& x : (*transform)[row]) x = -x;
    }
    for (std::size_t r = 0; r < row; ++r)
      if (m[r][col] != 0) combine(r, row, -floor_div(m[r][col], m[row][col]));
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

/// Hermite basis of the lattice spanned by `rows` (zero rows dropped).
inline Mat hermite_basis(Mat rows, std::size_t ncols) {
  auto piv = row_echelon(rows, ncols);
  rows.resize(piv.size());
  return rows;
}

/// x0 + span_Z(basis). Basis rows are in Hermite form with strictly
/// increasing pivots.
struct AffineLattice {
  Vec origin;
  Mat basis;
  std::size_t dimension() const { return basis.size(); }
};

/// One congruence  sum_k coeffs[k] * x_k == rhs  (mod modulus); modulus 0
/// means an exact equation.
struct Congruence {
  Vec coeffs;
  Int rhs = 0;
  Int modulus = 0;
};

struct LinearSystem {
  std::size_t nvars = 0;
  std::vector<Congruence> rows;

  void add(Vec coeffs, Int rhs, Int modulus = 0) {
    coeffs.resize(nvars, 0);
    rows.push_back({std::move(coeffs), rhs, modulus});
  }
};

/// Exact solution set of A x = b over Z, or nullopt if empty.
inline std::optional<AffineLattice> solve_exact(const Mat& a, const Vec& b, std::size_t n) {
  const std::size_t m = a.size();
  // Row-reduce A^T alongside the identity: V A^T = H, so A V^T = H^T.
  Mat at(n, Vec(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) at[j][i] = a[i][j];
  Mat v(n, Vec(n, 0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1;
  auto piv = row_echelon(at, m, &v);
  const std::size_t r = piv.size();
  Vec y(n, 0);
  for (std::size_t t = 0; t < r; ++t) {
    __int128 acc = b[piv[t]];
    for (std::size_t k = 0; k < t; ++k) acc -= static_cast<__int128>(at[k][piv[t]]) * y[k];
    Int rest = narrow(acc);
    if (rest % at[t][piv[t]] != 0) return std::nullopt;
    y[t] = rest / at[t][piv[t]];
  }
  for (std::size_t c = 0; c < m; ++c) {
    __int128 acc = 0;
    for (std::size_t k = 0; k < r; ++k) acc += static_cast<__int128>(at[k][c]) * y[k];
    if (acc != b[c]) return std::nullopt;
  }
  AffineLattice out;
  out.origin.assign(n, 0);
  for (std::size_t t = 0; t < r; ++t) axpy(out.origin, v[t], y[t]);
  Mat kernel(v.begin() + static_cast<std::ptrdiff_t>(r), v.end());
  out.basis = hermite_basis(std::move(kernel), n);
  return out;
}

/// Solves a congruence system by adjoining one slack variable per modular
/// row, then projects the solution lattice back onto the original variables.
inline std::optional<AffineLattice> solve(const LinearSystem& sys) {
  std::size_t slack = 0;
  for (const auto& row : sys.rows)
    if (row.modulus != 0) ++slack;
  const std::size_t n = sys.nvars + slack;
  Mat a;
  Vec b;
  std::size_t s = sys.nvars;
  for (const auto& row : sys.rows) {
    Vec r = row.coeffs;
    r.resize(n, 0);
    if (row.modulus != 0) r[s++] = row.modulus;
    a.push_back(std::move(r));
    b.push_back(row.rhs);
  }
  auto full = solve_exact(a, b, n);
  if (!full) return std::nullopt;
  AffineLattice out;
  out.origin.assign(full->origin.begin(), full->origin.begin() + static_cast<std::ptrdiff_t>(sys.nvars));
  Mat proj;
  for (const auto& row : full->basis)
    proj.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(sys.nvars));
  out.basis = hermite_basis(std::move(proj), sys.nvars);
  // Shorten the origin against the basis so enumeration starts nearby.
  for (const auto& row : out.basis) {
    std::size_t p = 0;
    while (row[p] == 0) ++p;
    axpy(out.origin, row, -floor_div(out.origin[p], row[p]));
  }
  return out;
}

/// Calls `visit` for every lattice point x with lo <= x <= hi componentwise,
/// in lexicographic order of the basis coefficients. `visit` returns false to
/// stop early. Returns false iff stopped early.
inline bool enumerate_box(const AffineLattice& lat, const Vec& lo, const Vec& hi,
                          const std::function<bool(const Vec&)>& visit) {
  const std::size_t n = lat.origin.size();
  std::vector<std::size_t> piv;
  for (const auto& row : lat.basis) {
    std::size_t p = 0;
    while (p < n && row[p] == 0) ++p;
    piv.push_back(p);
  }
  auto in_range = [&](const Vec& x, std::size_t from, std::size_t to) {
    for (std::size_t c = from; c < to; ++c)
      if (x[c] < lo[c] || x[c] > hi[c]) return false;
    return true;
  };
  std::function<bool(std::size_t, Vec&)> rec = [&](std::size_t t, Vec& cur) -> bool {
    std::size_t settled = t == 0 ? 0 : piv[t - 1] + 1;
    if (t == lat.basis.size()) {
      if (!in_range(cur, settled, n)) return true;
      return visit(cur);
    }
    if (!in_range(cur, settled, piv[t])) return true;
    const Int p = lat.basis[t][piv[t]];
    Int cmin = ceil_div(sub(lo[piv[t]], cur[piv[t]]), p);
    Int cmax = floor_div(sub(hi[piv[t]], cur[piv[t]]), p);
    for (Int c = cmin; c <= cmax; ++c) {
      Vec next = cur;
      axpy(next, lat.basis[t], c);
      if (!rec(t + 1, next)) return false;
    }
    return true;
  };
  Vec start = lat.origin;
  return rec(0, start);
}

/// Smith invariants of Z^ncols / rowspace(rel): one entry per cyclic factor,
/// 0 for an infinite cyclic factor, trivial factors omitted, ordered so that
/// each finite invariant divides the next and free factors come last.
inline Vec smith_invariants(Mat rel, std::size_t ncols) {
  std::size_t rows = rel.size();
  std::size_t t = 0;
  Vec diag;
  while (t < rows && t < ncols) {
    // smallest nonzero entry in the trailing block becomes the pivot
    std::size_t br = rows, bc = ncols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < ncols; ++j)
        if (rel[i][j] != 0 && (br == rows || std::abs(rel[i][j]) < std::abs(rel[br][bc]))) {
          br = i;
          bc = j;
        }
    if (br == rows) break;
    std::swap(rel[t], rel[br]);
    for (auto& r : rel) std::swap(r[t], r[bc]);
    bool clean = true;
    for (std::size_t i = t + 1; i < rows; ++i) {
      Int q = floor_div(rel[i][t], rel[t][t]);
      axpy(rel[i], rel[t], -q);
      if (rel[i][t] != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < ncols; ++j) {
      Int q = floor_div(rel[t][j], rel[t][t]);
      if (q != 0)
        for (std::size_t i = 0; i < rows; ++i) rel[i][j] = sub(rel[i][j], mul(q, rel[i][t]));
      if (rel[t][j] != 0) clean = false;
    }
    if (!clean) continue;
    // pivot must divide the remaining block
    bool divides = true;
    for (std::size_t i = t + 1; i < rows && divides; ++i)
      for (std::size_t j = t + 1; j < ncols; ++j)
        if (rel[i][j] % rel[t][t] != 0) {
          axpy(rel[t], rel[i], 1);
          divides = false;
          break;
        }
    if (!divides) continue;
    diag.push_back(std::abs(rel[t][t]));
    ++t;
  }
  Vec out;
  for (Int d : diag)
    if (d != 1) out.push_back(d);
  std::sort(out.begin(), out.end());
  for (std::size_t k = diag.size(); k < ncols; ++k) out.push_back(0);
  return out;
}

/// True iff the rows generate all of Z^ncols.
inline bool spans_unimodular(Mat rows, std::size_t ncols) {
  Mat h = hermite_basis(std::move(rows), ncols);
  if (h.size() != ncols) return false;
  for (std::size_t i = 0; i < ncols; ++i)
    if (h[i][i] != 1) return false;
  return true;
}

}  // namespace bsm::linalg
