#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "erexp/gf.hpp"
#include "erexp/rng.hpp"
#include "oracles.hpp"

using namespace erexp;
using namespace erexp::simulate;

namespace {

GfMatrix random_matrix(int rows, int cols, int q, Rng& rng) {
  GfMatrix m(rows, cols, q);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m.set(r, c, static_cast<std::uint8_t>(rng.below(static_cast<std::uint32_t>(q))));
  return m;
}

// independent elimination with randomly permuted rows/columns; rank is
// invariant under permutation, so this cross-checks gf_rank
int rank_permuted(const GfMatrix& m, Rng& rng) {
  const int rows = m.rows(), cols = m.cols(), q = m.field_order();
  std::vector<int> rp(rows), cp(cols);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(cp.begin(), cp.end(), 0);
  for (int i = rows - 1; i > 0; --i) std::swap(rp[i], rp[rng.below(i + 1)]);
  for (int i = cols - 1; i > 0; --i) std::swap(cp[i], cp[rng.below(i + 1)]);

  std::vector<std::vector<int>> a(rows, std::vector<int>(cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a[r][c] = m.at(rp[r], cp[c]);

  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      if (a[r][col] == 0) continue;
      // scale row r by pivot and subtract: avoids modular inversion entirely
      const int f1 = a[rank][col], f2 = a[r][col];
      for (int c = 0; c < cols; ++c)
        a[r][c] = ((a[r][c] * f1 - a[rank][c] * f2) % q + q) % q;
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("gf_rank basics") {
  CHECK(gf_rank(GfMatrix(3, 5, 2)) == 0);  // zero matrix

  for (int q : {2, 3, 5}) {
    GfMatrix id(4, 4, q);
    for (int i = 0; i < 4; ++i) id.set(i, i, 1);
    CHECK(gf_rank(id) == 4);
  }

  GfMatrix equal_rows(2, 2, 2);
  equal_rows.set(0, 0, 1);
  equal_rows.set(0, 1, 1);
  equal_rows.set(1, 0, 1);
  equal_rows.set(1, 1, 1);
  CHECK(gf_rank(equal_rows) == 1);

  CHECK_THROWS_AS(gf_rank(GfMatrix(2, 2, 4)), std::domain_error);
  CHECK_THROWS_AS(gf_rank(GfMatrix(2, 2, 6)), std::domain_error);
}

TEST_CASE("gf_rank agrees with permuted independent elimination") {
  Rng rng(1234);
  for (int q : {2, 3, 5}) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto m = random_matrix(8, 8, q, rng);
      CHECK(gf_rank(m) == rank_permuted(m, rng));
    }
  }
}

TEST_CASE("null space basis spans the kernel") {
  Rng rng(99);
  for (int q : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto h = random_matrix(4, 10, q, rng);
      const auto basis = null_space_basis(h);
      CHECK(basis.rows() == 10 - gf_rank(h));
      CHECK(gf_rank(basis) == basis.rows());
      for (int b = 0; b < basis.rows(); ++b) {
        for (int r = 0; r < h.rows(); ++r) {
          int acc = 0;
          for (int c = 0; c < 10; ++c) acc = (acc + h.at(r, c) * basis.at(b, c)) % q;
          CHECK(acc == 0);
        }
      }
    }
  }
}

TEST_CASE("erasure pattern masks") {
  const auto p = ErasurePattern::from_mask(0b101101, 6);
  CHECK(p.erased == std::vector<int>{0, 2, 3, 5});
  CHECK(p.to_mask() == 0b101101);
}

TEST_CASE("ml decode failure: tiny closed cases") {
  // single parity check over GF(2)
  GfMatrix h(1, 2, 2);
  h.set(0, 0, 1);
  h.set(0, 1, 1);
  CHECK(ml_decode_fails(h, CodeForm::parity_check, ErasurePattern::from_mask(0b11, 2)));
  CHECK_FALSE(ml_decode_fails(h, CodeForm::parity_check, ErasurePattern::from_mask(0b01, 2)));
  CHECK_FALSE(ml_decode_fails(h, CodeForm::parity_check, ErasurePattern::from_mask(0b00, 2)));

  // full-rank generator with no erasures never fails
  GfMatrix g(2, 3, 2);
  g.set(0, 0, 1);
  g.set(1, 1, 1);
  g.set(1, 2, 1);
  CHECK_FALSE(ml_decode_fails(g, CodeForm::generator, ErasurePattern{}));
}

TEST_CASE("ml decode matches the codeword-support oracle") {
  Rng rng(2024);
  for (int q : {2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 8 + static_cast<int>(rng.below(5));  // 8..12
      const int m = n / 2;
      const auto h = random_matrix(m, n, q, rng);
      const oracles::SupportOracle oracle(h, CodeForm::parity_check);
      for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        const auto pat = ErasurePattern::from_mask(mask, n);
        CHECK(ml_decode_fails(h, CodeForm::parity_check, pat) == oracle.fails(mask));
      }
    }
  }
}

TEST_CASE("parity-check and generator forms agree on dual pairs") {
  Rng rng(555);
  for (int q : {2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      const int n = 8 + static_cast<int>(rng.below(5));
      const auto h = random_matrix(n / 2, n, q, rng);
      const auto g = null_space_basis(h);
      for (int p = 0; p < 1000; ++p) {
        const std::uint64_t mask = rng.next() & ((1ull << n) - 1);
        const auto pat = ErasurePattern::from_mask(mask, n);
        CHECK(ml_decode_fails(h, CodeForm::parity_check, pat) ==
              ml_decode_fails(g, CodeForm::generator, pat));
      }
    }
  }
}
