#include <gtest/gtest.h>

#include <random>

#include "lps/linalg.hpp"

using namespace lps;

namespace {

/// Dense fraction-free (Bareiss) rank, independent of the library path.
int bareiss_rank(std::vector<std::vector<Int>> a) {
  const int m = static_cast<int>(a.size());
  const int n = m ? static_cast<int>(a[0].size()) : 0;
  int rank = 0;
  Int prev = 1;
  for (int c = 0; c < n && rank < m; ++c) {
    int piv = rank;
    while (piv < m && a[piv][c] == 0) ++piv;
    if (piv == m) continue;
    std::swap(a[rank], a[piv]);
    for (int i = rank + 1; i < m; ++i) {
      for (int k = c + 1; k < n; ++k) a[i][k] = exact_quotient(a[rank][c] * a[i][k] - a[i][c] * a[rank][k], prev);
      a[i][c] = 0;
    }
    prev = a[rank][c];
    ++rank;
  }
  return rank;
}

RatMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, int rank_hint, double density) {
  // product of (rows x r) and (r x cols) with sparse-ish random integer factors
  std::uniform_int_distribution<int> v(-4, 4);
  std::bernoulli_distribution keep(density);
  std::vector<std::vector<Rat>> b(rows, std::vector<Rat>(rank_hint)), c(rank_hint, std::vector<Rat>(cols));
  for (auto& r : b)
    for (auto& x : r) x = keep(rng) ? Rat(v(rng)) : Rat(0);
  for (auto& r : c)
    for (auto& x : r) x = keep(rng) ? Rat(Int(v(rng)), Int(1 + (v(rng) & 1))) : Rat(0);
  std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols, Rat(0)));
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < rank_hint; ++k)
      if (!b[i][k].is_zero())
        for (int j = 0; j < cols; ++j) a[i][j] += b[i][k] * c[k][j];
  return RatMatrix::dense(a);
}

std::vector<std::vector<Int>> integer_dense(const RatMatrix& m) {
  std::vector<std::vector<Int>> a(m.rows(), std::vector<Int>(m.cols()));
  for (int r = 0; r < m.rows(); ++r) {
    Int l = 1;
    for (const auto& e : m.row(r)) l = lcm(l, e.second.den());
    for (const auto& [c, x] : m.row(r)) a[r][c] = exact_quotient(x.num() * l, x.den());
  }
  return a;
}

}  // namespace

TEST(Nullspace, Identity) {
  auto m = RatMatrix::dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_TRUE(nullspace(m).empty());
}

TEST(Nullspace, SingleRow) {
  auto basis = nullspace(RatMatrix::dense({{1, 1}}));
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_EQ(basis[0], (RatVector{1, -1}));
}

TEST(Nullspace, ProductWithKnownKernel) {
  auto c = RatMatrix::dense({{1, 0, 1, 1}, {0, 1, 2, 3}});
  std::vector<std::vector<Rat>> b = {{2, 1}, {-1, 3}, {5, 0}};
  std::vector<std::vector<Rat>> a(3, std::vector<Rat>(4, Rat(0)));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 4; ++j) a[i][j] += b[i][k] * c.get(k, j);
  auto am = RatMatrix::dense(a);
  auto basis = nullspace(am);
  ASSERT_EQ(basis.size(), 2u);
  auto cbasis = nullspace(c);
  EXPECT_EQ(basis, cbasis);
  for (const auto& v : basis) EXPECT_EQ(am.multiply(v), (RatVector{0, 0, 0}));
}

TEST(SolveAffine, Examples) {
  auto s = solve_affine(RatMatrix::dense({{1, 1}}), {Rat(-2)});
  ASSERT_TRUE(s);
  ASSERT_TRUE(s->particular);
  EXPECT_EQ(*s->particular, (RatVector{-2, 0}));
  ASSERT_EQ(s->nullspace_basis.size(), 1u);
  EXPECT_EQ(s->nullspace_basis[0], (RatVector{1, -1}));

  EXPECT_FALSE(solve_affine(RatMatrix::dense({{0}}), {Rat(1)}));

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> v(-6, 6);
  for (int t = 0; t < 200; ++t) {
    auto m = random_matrix(rng, 6, 5, 1 + t % 5, 0.7);
    RatVector x0(5);
    for (auto& e : x0) e = Rat(Int(v(rng)), Int(1 + (t % 3)));
    RatVector rhs = m.multiply(x0);
    auto sol = solve_affine(m, rhs);
    ASSERT_TRUE(sol);
    EXPECT_EQ(m.multiply(*sol->particular), rhs);
    for (const auto& k : sol->nullspace_basis) EXPECT_EQ(m.multiply(k), RatVector(6, Rat(0)));
  }
}

TEST(Nullspace, RandomizedRankNullityAndPathIndependence) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 9);
  for (int t = 0; t < 1000; ++t) {
    const int rows = dim(rng), cols = dim(rng);
    auto m = random_matrix(rng, rows, cols, 1 + t % std::min(rows, cols), 0.6);
    NullspaceStats es, ms;
    auto exact = nullspace(m, {NullspaceStrategy::Exact, 1}, &es);
    auto modular = nullspace(m, {NullspaceStrategy::Modular, 1}, &ms);
    ASSERT_EQ(exact, modular);
    const int rank = bareiss_rank(integer_dense(m));
    ASSERT_EQ(rank + static_cast<int>(exact.size()), cols);
    for (const auto& v : exact) ASSERT_EQ(m.multiply(v), RatVector(rows, Rat(0)));
    // determinism
    ASSERT_EQ(nullspace(m), exact);
  }
}

TEST(Nullspace, LargeSparseSystemAgreesAcrossPaths) {
  std::mt19937_64 rng(99);
  auto m = random_matrix(rng, 60, 40, 31, 0.15);
  NullspaceStats ms;
  auto modular = nullspace(m, {NullspaceStrategy::Modular, 2}, &ms);
  auto exact = nullspace(m, {NullspaceStrategy::Exact, 1});
  EXPECT_TRUE(ms.used_modular);
  EXPECT_EQ(modular, exact);
  EXPECT_EQ(bareiss_rank(integer_dense(m)) + static_cast<int>(exact.size()), 40);
}

TEST(RationalReconstruct, RecoversSmallFractions) {
  const Int mod = Int(2147483647) * Int(2147483629);
  for (int n = -30; n <= 30; ++n) {
    for (int d = 1; d <= 30; ++d) {
      Rat q{Int(n), Int(d)};
      Int inv;
      Int den = q.den();
      mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
      Int a = q.num() * inv;
      mpz_fdiv_r(a.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t());
      auto r = detail::rational_reconstruct(a, mod);
      ASSERT_TRUE(r);
      EXPECT_EQ(*r, q);
    }
  }
}
