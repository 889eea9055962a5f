#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "lps/errors.hpp"
#include "lps/rat.hpp"

namespace lps {

using RatVector = std::vector<Rat>;

/// Sparse matrix over Q, row-major; rows keep their entries sorted by column
/// with no stored zeros.
class RatMatrix {
public:
  using Entry = std::pair<int, Rat>;

  RatMatrix() = default;
  RatMatrix(int rows, int cols) : cols_(cols), rows_(static_cast<std::size_t>(rows)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }

  static RatMatrix dense(const std::vector<std::vector<Rat>>& a) {
    const int cols = a.empty() ? 0 : static_cast<int>(a.front().size());
    RatMatrix m(static_cast<int>(a.size()), cols);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (static_cast<int>(a[r].size()) != cols) throw std::invalid_argument("ragged matrix");
      for (int c = 0; c < cols; ++c) m.set(static_cast<int>(r), c, a[r][c]);
    }
    return m;
  }

  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }

  void set(int r, int c, const Rat& v) {
    check(r, c);
    auto& row = rows_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, int key) { return e.first < key; });
    if (it != row.end() && it->first == c) {
      if (v.is_zero()) {
        row.erase(it);
      } else {
        it->second = v;
      }
    } else if (!v.is_zero()) {
      row.insert(it, {c, v});
    }
  }

  Rat get(int r, int c) const {
    check(r, c);
    const auto& row = rows_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, int key) { return e.first < key; });
    return (it != row.end() && it->first == c) ? it->second : Rat(0);
  }

  /// Appends a row given as (column, value) pairs in any order.
  void add_row(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::vector<Entry> row;
    for (auto& e : entries) {
      if (e.first < 0 || e.first >= cols_) throw std::out_of_range("matrix column");
      if (!row.empty() && row.back().first == e.first) {
        row.back().second += e.second;
      } else {
        row.push_back(std::move(e));
      }
    }
    std::erase_if(row, [](const Entry& e) { return e.second.is_zero(); });
    rows_.push_back(std::move(row));
  }

  const std::vector<Entry>& row(int r) const { return rows_.at(static_cast<std::size_t>(r)); }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

  RatVector multiply(const RatVector& v) const {
    if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("dimension mismatch");
    RatVector out(rows_.size(), Rat(0));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      mpq_class s = 0;
      for (const auto& [c, a] : rows_[r]) s += a.raw() * v[c].raw();
      out[r] = Rat(s);
    }
    return out;
  }

private:
  void check(int r, int c) const {
    if (r < 0 || r >= rows() || c < 0 || c >= cols_) throw std::out_of_range("matrix index");
  }

  int cols_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

/// Particular solution (absent when the system is homogeneous-only) plus a
/// kernel basis.
struct AffineSolutionSet {
  std::optional<RatVector> particular;
  std::vector<RatVector> nullspace_basis;
};

enum class NullspaceStrategy { Auto, Exact, Modular };

struct NullspaceOptions {
  NullspaceStrategy strategy = NullspaceStrategy::Auto;
  unsigned threads = 1;
};

struct NullspaceStats {
  bool used_modular = false;
  int primes = 0;
  int rank = 0;
};

namespace detail {

/// Scales to coprime integers with the first nonzero entry positive.
inline void make_primitive(RatVector& v) {
  Int g(0), l(1);
  for (const auto& x : v) {
    if (x.is_zero()) continue;
    g = gcd(g, x.num());
    l = lcm(l, x.den());
  }
  if (g == 0) return;
  Rat s(l, g);
  auto first = std::find_if(v.begin(), v.end(), [](const Rat& x) { return !x.is_zero(); });
  if (first->sign() < 0) s = -s;
  for (auto& x : v) x *= s;
}

/// Canonical basis of span(basis): reduced row echelon form where columns are
/// eliminated from the last one down, each vector then made primitive.
inline std::vector<RatVector> canonical_basis(std::vector<RatVector> basis) {
  if (basis.empty()) return basis;
  const int n = static_cast<int>(basis.front().size());
  std::size_t r = 0;
  for (int c = n - 1; c >= 0 && r < basis.size(); --c) {
    std::size_t piv = r;
    while (piv < basis.size() && basis[piv][c].is_zero()) ++piv;
    if (piv == basis.size()) continue;
    std::swap(basis[r], basis[piv]);
    Rat inv = basis[r][c].inverse();
    for (auto& x : basis[r]) x *= inv;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (i == r || basis[i][c].is_zero()) continue;
      Rat f = basis[i][c];
      for (int k = 0; k < n; ++k)
        if (!basis[r][k].is_zero()) basis[i][k] -= f * basis[r][k];
    }
    ++r;
  }
  basis.resize(r);
  for (auto& v : basis) make_primitive(v);
  return basis;
}

using IntRow = std::vector<std::pair<int, Int>>;

inline IntRow integer_row(const std::vector<RatMatrix::Entry>& row) {
  Int l(1);
  for (const auto& e : row) l = lcm(l, e.second.den());
  IntRow out;
  out.reserve(row.size());
  Int g(0);
  for (const auto& [c, v] : row) {
    Int x = exact_quotient(v.num() * l, v.den());
    g = gcd(g, x);
    out.emplace_back(c, std::move(x));
  }
  if (g > 1)
    for (auto& e : out) e.second = exact_quotient(e.second, g);
  return out;
}

/// Fraction-free sparse elimination with Markowitz-style pivot choice (column
/// with fewest nonzeros, then the sparsest row; ties by index). Returns the
/// raw kernel basis and the rank.
inline std::vector<RatVector> exact_kernel(const RatMatrix& m, int& rank) {
  const int n = m.cols();
  std::vector<IntRow> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()));
  for (int r = 0; r < m.rows(); ++r)
    if (!m.row(r).empty()) rows.push_back(integer_row(m.row(r)));
  std::vector<bool> active(rows.size(), true);
  std::vector<std::pair<int, std::size_t>> pivots;  // (column, row)
  std::vector<bool> is_pivot_col(static_cast<std::size_t>(n), false);

  while (true) {
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (active[i])
        for (const auto& e : rows[i]) ++count[e.first];
    int col = -1;
    for (int c = 0; c < n; ++c)
      if (count[c] > 0 && (col < 0 || count[c] < count[col])) col = c;
    if (col < 0) break;
    std::size_t prow = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!active[i]) continue;
      bool has = std::any_of(rows[i].begin(), rows[i].end(), [&](const auto& e) { return e.first == col; });
      if (has && (prow == rows.size() || rows[i].size() < rows[prow].size())) prow = i;
    }
    active[prow] = false;
    pivots.emplace_back(col, prow);
    is_pivot_col[col] = true;
    const IntRow& pr = rows[prow];
    const Int pv = std::find_if(pr.begin(), pr.end(), [&](const auto& e) { return e.first == col; })->second;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!active[i]) continue;
      auto it = std::find_if(rows[i].begin(), rows[i].end(), [&](const auto& e) { return e.first == col; });
      if (it == rows[i].end()) continue;
      const Int a = it->second;
      // row_i <- pv * row_i - a * pivot_row, merged by column
      IntRow merged;
      merged.reserve(rows[i].size() + pr.size());
      auto x = rows[i].cbegin();
      auto y = pr.cbegin();
      Int g(0);
      while (x != rows[i].end() || y != pr.end()) {
        int c;
        Int v;
        if (y == pr.end() || (x != rows[i].end() && x->first < y->first)) {
          c = x->first;
          v = pv * x->second;
          ++x;
        } else if (x == rows[i].end() || y->first < x->first) {
          c = y->first;
          v = -a * y->second;
          ++y;
        } else {
          c = x->first;
          v = pv * x->second - a * y->second;
          ++x;
          ++y;
        }
        if (v != 0) {
          g = gcd(g, v);
          merged.emplace_back(c, std::move(v));
        }
      }
      if (g > 1)
        for (auto& e : merged) e.second = exact_quotient(e.second, g);
      rows[i] = std::move(merged);
      if (rows[i].empty()) active[i] = false;
    }
  }
  rank = static_cast<int>(pivots.size());

  std::vector<RatVector> basis;
  for (int f = 0; f < n; ++f) {
    if (is_pivot_col[f]) continue;
    RatVector v(static_cast<std::size_t>(n), Rat(0));
    v[f] = Rat(1);
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
      const auto& [col, ri] = *it;
      mpq_class s = 0;
      Int pv;
      for (const auto& [c, a] : rows[ri]) {
        if (c == col) {
          pv = a;
        } else if (!v[c].is_zero()) {
          s += mpq_class(a) * v[c].raw();
        }
      }
      v[col] = Rat(mpq_class(-s / mpq_class(pv)));
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---- modular arithmetic -------------------------------------------------

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

/// Primes just below 2^31, descending; deterministic.
inline std::uint64_t nth_large_prime(int i) {
  static std::mutex mu;
  static std::vector<std::uint64_t> cache;
  std::lock_guard<std::mutex> lock(mu);
  std::uint64_t c = cache.empty() ? (1ull << 31) : cache.back();
  while (static_cast<int>(cache.size()) <= i) {
    do {
      --c;
    } while (mpz_probab_prime_p(Int(static_cast<unsigned long>(c)).get_mpz_t(), 30) == 0);
    cache.push_back(c);
  }
  return cache[static_cast<std::size_t>(i)];
}

struct ModImage {
  bool valid = false;  // false when p divides a denominator
  int rank = 0;
  std::vector<int> pattern;                      // pivot columns of the canonical kernel basis
  std::vector<std::vector<std::uint64_t>> basis;  // canonical kernel basis mod p
};

inline ModImage modular_image(const RatMatrix& m, std::uint64_t p) {
  ModImage img;
  const int n = m.cols();
  std::vector<std::vector<std::uint64_t>> a;
  a.reserve(static_cast<std::size_t>(m.rows()));
  for (int r = 0; r < m.rows(); ++r) {
    if (m.row(r).empty()) continue;
    std::vector<std::uint64_t> row(static_cast<std::size_t>(n), 0);
    for (const auto& [c, v] : m.row(r)) {
      std::uint64_t d = mod_u64(v.den(), p);
      if (d == 0) return img;
      row[c] = mod_u64(v.num(), p) * invmod(d, p) % p;
    }
    a.push_back(std::move(row));
  }
  img.valid = true;
  // reduced row echelon form
  std::vector<int> pivcol;
  std::size_t r = 0;
  for (int c = 0; c < n && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    const std::uint64_t inv = invmod(a[r][c], p);
    for (int k = c; k < n; ++k) a[r][k] = a[r][k] * inv % p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::uint64_t f = p - a[i][c];
      auto& ri = a[i];
      const auto& rr = a[r];
      for (int k = c; k < n; ++k)
        if (rr[k]) ri[k] = (ri[k] + f * rr[k]) % p;
    }
    pivcol.push_back(c);
    ++r;
  }
  img.rank = static_cast<int>(pivcol.size());
  std::vector<bool> is_piv(static_cast<std::size_t>(n), false);
  for (int c : pivcol) is_piv[c] = true;
  auto& basis = img.basis;
  for (int f = 0; f < n; ++f) {
    if (is_piv[f]) continue;
    std::vector<std::uint64_t> v(static_cast<std::size_t>(n), 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = (p - a[i][f]) % p;
    basis.push_back(std::move(v));
  }
  // canonical form: RREF of the basis, eliminating from the last column down
  std::size_t br = 0;
  for (int c = n - 1; c >= 0 && br < basis.size(); --c) {
    std::size_t piv = br;
    while (piv < basis.size() && basis[piv][c] == 0) ++piv;
    if (piv == basis.size()) continue;
    std::swap(basis[br], basis[piv]);
    const std::uint64_t inv = invmod(basis[br][c], p);
    for (auto& x : basis[br]) x = x * inv % p;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (i == br || basis[i][c] == 0) continue;
      const std::uint64_t f = p - basis[i][c];
      for (int k = 0; k < n; ++k)
        if (basis[br][k]) basis[i][k] = (basis[i][k] + f * basis[br][k]) % p;
    }
    img.pattern.push_back(c);
    ++br;
  }
  return img;
}

/// n/d with |n|, d <= sqrt(modulus / 2) and n = a*d mod modulus.
inline std::optional<Rat> rational_reconstruct(const Int& a, const Int& modulus) {
  Int bound;
  Int half = modulus / 2;
  mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
  Int r0 = modulus, r1 = a, t0 = 0, t1 = 1;
  while (r1 > bound) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1;
    Int t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  Int at = abs(t1);
  if (at == 0 || at > bound || gcd(r1, at) != 1) return std::nullopt;
  return Rat(t1 < 0 ? Int(-r1) : r1, at);
}

inline bool is_kernel_vector(const RatMatrix& m, const RatVector& v) {
  for (int r = 0; r < m.rows(); ++r) {
    mpq_class s = 0;
    for (const auto& [c, a] : m.row(r)) s += a.raw() * v[c].raw();
    if (sgn(s) != 0) return false;
  }
  return true;
}

inline std::optional<std::vector<RatVector>> modular_kernel(const RatMatrix& m, unsigned threads,
                                                            NullspaceStats& stats) {
  const int n = m.cols();
  constexpr int kMaxPrimes = 96;
  int next = 0;
  int best_dim = n + 1;
  std::vector<int> best_pattern;
  Int modulus;
  std::vector<std::vector<Int>> acc;  // CRT residues for the current best group
  std::optional<std::vector<RatVector>> previous;
  const unsigned batch = std::max(1u, threads);

  while (next < kMaxPrimes) {
    std::vector<std::uint64_t> primes;
    for (unsigned k = 0; k < batch; ++k) primes.push_back(nth_large_prime(next++));
    std::vector<ModImage> images(primes.size());
    if (primes.size() == 1) {
      images[0] = modular_image(m, primes[0]);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t k = 0; k < primes.size(); ++k)
        pool.emplace_back([&, k] { images[k] = modular_image(m, primes[k]); });
      for (auto& t : pool) t.join();
    }
    for (std::size_t k = 0; k < primes.size(); ++k) {
      const ModImage& img = images[k];
      const std::uint64_t p = primes[k];
      if (!img.valid) continue;
      ++stats.primes;
      const int dim = static_cast<int>(img.basis.size());
      if (dim == 0) {
        stats.rank = img.rank;
        return std::vector<RatVector>{};
      }
      if (dim > best_dim || (dim == best_dim && img.pattern != best_pattern)) continue;
      if (dim < best_dim) {
        best_dim = dim;
        best_pattern = img.pattern;
        modulus = Int(static_cast<unsigned long>(p));
        acc.assign(static_cast<std::size_t>(dim), std::vector<Int>(static_cast<std::size_t>(n)));
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < n; ++j) acc[i][j] = Int(static_cast<unsigned long>(img.basis[i][j]));
        previous.reset();
        stats.rank = img.rank;
      } else {
        const Int pm(static_cast<unsigned long>(p));
        Int minv;
        mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), pm.get_mpz_t());
        for (int i = 0; i < dim; ++i) {
          for (int j = 0; j < n; ++j) {
            Int diff = Int(static_cast<unsigned long>(img.basis[i][j])) - acc[i][j];
            Int t = diff * minv;
            mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), pm.get_mpz_t());
            acc[i][j] += modulus * t;
          }
        }
        modulus *= pm;
      }
      // attempt reconstruction
      std::vector<RatVector> rec;
      bool ok = true;
      for (int i = 0; i < best_dim && ok; ++i) {
        RatVector v(static_cast<std::size_t>(n));
        for (int j = 0; j < n && ok; ++j) {
          auto q = rational_reconstruct(acc[i][j], modulus);
          if (!q) {
            ok = false;
          } else {
            v[j] = *q;
          }
        }
        rec.push_back(std::move(v));
      }
      if (!ok) continue;
      if (previous && *previous == rec) {
        if (std::all_of(rec.begin(), rec.end(), [&](const RatVector& v) { return is_kernel_vector(m, v); }))
          return rec;
      }
      previous = std::move(rec);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Basis of the kernel of m in canonical form: reduced row echelon form with
/// columns eliminated from the last one down, each vector scaled to coprime
/// integers with its first nonzero entry positive. The result does not
/// depend on the elimination path taken.
inline std::vector<RatVector> nullspace(const RatMatrix& m, const NullspaceOptions& opts = {},
                                        NullspaceStats* stats_out = nullptr) {
  NullspaceStats stats;
  std::vector<RatVector> basis;
  bool done = false;
  const bool big = static_cast<long>(m.rows()) * m.cols() > 400;
  if (opts.strategy == NullspaceStrategy::Modular ||
      (opts.strategy == NullspaceStrategy::Auto && big)) {
    if (auto b = detail::modular_kernel(m, opts.threads, stats)) {
      basis = std::move(*b);
      stats.used_modular = true;
      done = true;
    }
  }
  if (!done) {
    int rank = 0;
    basis = detail::exact_kernel(m, rank);
    stats.rank = rank;
    stats.used_modular = false;
  }
  basis = detail::canonical_basis(std::move(basis));
  for (const auto& v : basis)
    if (!detail::is_kernel_vector(m, v)) throw InternalError("nullspace vector fails M*v = 0");
  if (stats_out) *stats_out = stats;
  return basis;
}

/// Solves m * v = rhs. Returns std::nullopt when the system is inconsistent.
inline std::optional<AffineSolutionSet> solve_affine(const RatMatrix& m, const RatVector& rhs,
                                                     const NullspaceOptions& opts = {}) {
  if (static_cast<int>(rhs.size()) != m.rows()) throw std::invalid_argument("dimension mismatch");
  const int n = m.cols();
  RatMatrix aug(0, n + 1);
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<RatMatrix::Entry> row = m.row(r);
    if (!rhs[r].is_zero()) row.emplace_back(n, -rhs[r]);
    aug.add_row(std::move(row));
  }
  auto basis = nullspace(aug, opts);
  AffineSolutionSet out;
  for (auto& v : basis) {
    if (!v[n].is_zero()) {
      Rat s = v[n].inverse();
      RatVector x(v.begin(), v.end() - 1);
      for (auto& e : x) e *= s;
      out.particular = std::move(x);
    } else {
      out.nullspace_basis.emplace_back(v.begin(), v.end() - 1);
    }
  }
  if (!out.particular) return std::nullopt;
  if (m.multiply(*out.particular) != rhs) throw InternalError("affine solution residual nonzero");
  return out;
}

}  // namespace lps
