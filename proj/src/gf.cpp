#include "erexp/gf.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace erexp::simulate {

bool is_prime(int q) {
  if (q < 2) return false;
  for (int d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

GfMatrix::GfMatrix(int rows, int cols, int q) : rows_(rows), cols_(cols), q_(q) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("GfMatrix: negative dimension");
  if (q < 2) throw std::invalid_argument("GfMatrix: field order must be >= 2");
  a_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

ErasurePattern ErasurePattern::from_mask(std::uint64_t mask, int n) {
  ErasurePattern p;
  for (int i = 0; i < n; ++i)
    if ((mask >> i) & 1u) p.erased.push_back(i);
  return p;
}

std::uint64_t ErasurePattern::to_mask() const {
  std::uint64_t m = 0;
  for (int i : erased) m |= (1ull << i);
  return m;
}

namespace {

void require_prime(int q) {
  if (!is_prime(q)) throw std::domain_error("unsupported field order: q must be prime");
}

// multiplicative inverses 1..q-1 by Fermat exponentiation (q prime, small)
std::vector<std::uint8_t> inverse_table(int q) {
  std::vector<std::uint8_t> inv(q, 0);
  for (int a = 1; a < q; ++a) {
    long long r = 1, b = a, e = q - 2;
    while (e) {
      if (e & 1) r = r * b % q;
      b = b * b % q;
      e >>= 1;
    }
    inv[a] = static_cast<std::uint8_t>(r);
  }
  return inv;
}

// in-place elimination on a row-major byte matrix mod q; returns rank and
// leaves the matrix in row echelon form
int eliminate(std::vector<std::uint8_t>& a, int rows, int cols, int q) {
  const auto inv = inverse_table(q);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (a[static_cast<std::size_t>(r) * cols + col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (int c = col; c < cols; ++c)
        std::swap(a[static_cast<std::size_t>(pivot) * cols + c],
                  a[static_cast<std::size_t>(rank) * cols + c]);
    const int pv = a[static_cast<std::size_t>(rank) * cols + col];
    const int pinv = inv[pv];
    for (int c = col; c < cols; ++c) {
      auto& x = a[static_cast<std::size_t>(rank) * cols + c];
      x = static_cast<std::uint8_t>(x * pinv % q);
    }
    for (int r = 0; r < rows; ++r) {
      if (r == rank) continue;
      const int f = a[static_cast<std::size_t>(r) * cols + col];
      if (f == 0) continue;
      for (int c = col; c < cols; ++c) {
        auto& x = a[static_cast<std::size_t>(r) * cols + c];
        x = static_cast<std::uint8_t>(
            (x + (q - f) * a[static_cast<std::size_t>(rank) * cols + c]) % q);
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

namespace detail {

BitMatrix pack_gf2(const GfMatrix& m) {
  BitMatrix b;
  b.resize(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m.at(r, c)) b.set(r, c);
  return b;
}

GfMatrix unpack_gf2(const BitMatrix& b) {
  GfMatrix m(b.rows, b.cols, 2);
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c)
      if (b.get(r, c)) m.set(r, c, 1);
  return m;
}

int rank_gf2_masked(const BitMatrix& m, std::span<const std::uint64_t> mask,
                    std::vector<std::uint64_t>& scratch) {
  const int wpr = m.wpr;
  scratch.assign(m.w.size(), 0);
  for (int r = 0; r < m.rows; ++r)
    for (int k = 0; k < wpr; ++k)
      scratch[static_cast<std::size_t>(r) * wpr + k] = m.row(r)[k] & mask[k];

  int rank = 0;
  for (int r = 0; r < m.rows; ++r) {
    auto* row_r = scratch.data() + static_cast<std::size_t>(r) * wpr;
    // leading bit of the current row
    int lead = -1;
    for (int k = 0; k < wpr && lead < 0; ++k)
      if (row_r[k]) lead = k * 64 + std::countr_zero(row_r[k]);
    if (lead < 0) continue;
    // clear that bit from all later rows
    const int wk = lead >> 6;
    const std::uint64_t bit = 1ull << (lead & 63);
    for (int s = r + 1; s < m.rows; ++s) {
      auto* row_s = scratch.data() + static_cast<std::size_t>(s) * wpr;
      if (row_s[wk] & bit)
        for (int k = 0; k < wpr; ++k) row_s[k] ^= row_r[k];
    }
    ++rank;
  }
  return rank;
}

BitMatrix multiply_gf2(const BitMatrix& lhs, const BitMatrix& rhs) {
  if (lhs.cols != rhs.rows)
    throw std::invalid_argument("multiply_gf2: inner dimensions differ");
  BitMatrix out;
  out.resize(lhs.rows, rhs.cols);
  for (int i = 0; i < lhs.rows; ++i) {
    auto* dst = out.row(i);
    for (int t = 0; t < lhs.cols; ++t)
      if (lhs.get(i, t)) {
        const auto* src = rhs.row(t);
        for (int k = 0; k < rhs.wpr; ++k) dst[k] ^= src[k];
      }
  }
  return out;
}

}  // namespace detail

int gf_rank(const GfMatrix& m) {
  require_prime(m.field_order());
  if (m.rows() == 0 || m.cols() == 0) return 0;
  if (m.field_order() == 2) {
    auto b = detail::pack_gf2(m);
    std::vector<std::uint64_t> mask(b.wpr, ~0ull);
    std::vector<std::uint64_t> scratch;
    return detail::rank_gf2_masked(b, mask, scratch);
  }
  std::vector<std::uint8_t> a(m.rows() * static_cast<std::size_t>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) a[static_cast<std::size_t>(r) * m.cols() + c] = m.at(r, c);
  return eliminate(a, m.rows(), m.cols(), m.field_order());
}

GfMatrix null_space_basis(const GfMatrix& m) {
  require_prime(m.field_order());
  const int rows = m.rows(), cols = m.cols(), q = m.field_order();
  std::vector<std::uint8_t> a(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a[static_cast<std::size_t>(r) * cols + c] = m.at(r, c);
  const int rank = eliminate(a, rows, cols, q);

  // pivots are the leading columns of the reduced rows
  std::vector<int> pivot_col;
  std::vector<bool> is_pivot(cols, false);
  for (int r = 0; r < rank; ++r)
    for (int c = 0; c < cols; ++c)
      if (a[static_cast<std::size_t>(r) * cols + c] != 0) {
        pivot_col.push_back(c);
        is_pivot[c] = true;
        break;
      }

  const int k = cols - rank;
  GfMatrix basis(k, cols, q);
  int bi = 0;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    basis.set(bi, free, 1);
    // pivot variables solve row * x = 0 with the free variable set to 1
    for (int r = 0; r < rank; ++r) {
      const int coef = a[static_cast<std::size_t>(r) * cols + free];
      if (coef != 0) basis.set(bi, pivot_col[r], static_cast<std::uint8_t>((q - coef) % q));
    }
    ++bi;
  }
  return basis;
}

bool ml_decode_fails(const GfMatrix& code, CodeForm form,
                     const ErasurePattern& pattern) {
  require_prime(code.field_order());
  const int n = code.cols();
  for (int i : pattern.erased)
    if (i < 0 || i >= n) throw std::invalid_argument("ml_decode_fails: erased position out of range");

  std::vector<bool> erased(n, false);
  for (int i : pattern.erased) erased[i] = true;

  if (code.field_order() == 2) {
    auto b = detail::pack_gf2(code);
    std::vector<std::uint64_t> mask(b.wpr, 0);
    for (int c = 0; c < n; ++c) {
      const bool keep = (form == CodeForm::parity_check) ? erased[c] : !erased[c];
      if (keep) mask[c >> 6] |= (1ull << (c & 63));
    }
    std::vector<std::uint64_t> scratch;
    const int rank = detail::rank_gf2_masked(b, mask, scratch);
    if (form == CodeForm::parity_check)
      return rank < static_cast<int>(pattern.erased.size());
    return rank < code.rows();
  }

  // general prime field: extract the selected columns and eliminate
  std::vector<int> keep_cols;
  for (int c = 0; c < n; ++c) {
    const bool keep = (form == CodeForm::parity_check) ? erased[c] : !erased[c];
    if (keep) keep_cols.push_back(c);
  }
  const int rows = code.rows(), cols = static_cast<int>(keep_cols.size());
  std::vector<std::uint8_t> a(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      a[static_cast<std::size_t>(r) * cols + c] = code.at(r, keep_cols[c]);
  const int rank = eliminate(a, rows, cols, code.field_order());
  if (form == CodeForm::parity_check)
    return rank < static_cast<int>(pattern.erased.size());
  return rank < rows;
}

}  // namespace erexp::simulate
