#ifndef EREXP_GF_HPP
#define EREXP_GF_HPP

#include <cstdint>
#include <span>
#include <vector>

// Dense matrices over prime fields GF(p) with Gaussian-elimination rank and
// the erasure-ML decodability test. A bit-packed fast path handles GF(2).
namespace erexp::simulate {

bool is_prime(int q);

class GfMatrix {
 public:
  GfMatrix() = default;
  GfMatrix(int rows, int cols, int q);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int field_order() const { return q_; }

  std::uint8_t at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  void set(int r, int c, std::uint8_t v) { a_[static_cast<std::size_t>(r) * cols_ + c] = v; }
  std::span<const std::uint8_t> row(int r) const {
    return {a_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }

  bool operator==(const GfMatrix&) const = default;

 private:
  int rows_ = 0, cols_ = 0, q_ = 2;
  std::vector<std::uint8_t> a_;
};

// Erasure pattern: the set of erased codeword positions.
struct ErasurePattern {
  std::vector<int> erased;  // sorted, distinct, in [0, n)

  static ErasurePattern from_mask(std::uint64_t mask, int n);
  std::uint64_t to_mask() const;  // valid for n <= 64
};

enum class CodeForm { generator, parity_check };

/// Rank over GF(q), q prime; the input is not modified.
int gf_rank(const GfMatrix& m);

/// Basis of the right null space of m as rows of a k x cols matrix with
/// k = cols - rank(m).
GfMatrix null_space_basis(const GfMatrix& m);

/// ML erasure decoding failure test. In parity-check form decoding fails
/// iff the erased-column submatrix of H has rank < |erased|; in generator
/// form iff the received-column submatrix of G has rank < k.
bool ml_decode_fails(const GfMatrix& code, CodeForm form,
                     const ErasurePattern& pattern);

namespace detail {

// Row-major bit matrix over GF(2), 64 columns per word.
struct BitMatrix {
  int rows = 0, cols = 0, wpr = 0;
  std::vector<std::uint64_t> w;

  void resize(int r, int c) {
    rows = r;
    cols = c;
    wpr = (c + 63) / 64;
    w.assign(static_cast<std::size_t>(r) * wpr, 0);
  }
  std::uint64_t* row(int r) { return w.data() + static_cast<std::size_t>(r) * wpr; }
  const std::uint64_t* row(int r) const {
    return w.data() + static_cast<std::size_t>(r) * wpr;
  }
  void set(int r, int c) { row(r)[c >> 6] |= (1ull << (c & 63)); }
  bool get(int r, int c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
};

BitMatrix pack_gf2(const GfMatrix& m);
GfMatrix unpack_gf2(const BitMatrix& b);

// Rank of the rows of `m` restricted to the columns selected by `mask`
// (mask has m.wpr words). Destroys `scratch`.
int rank_gf2_masked(const BitMatrix& m, std::span<const std::uint64_t> mask,
                    std::vector<std::uint64_t>& scratch);

// b = a * b_rows over GF(2): out.row(i) = xor of rhs rows selected by
// lhs.row(i); lhs is k x h, rhs is h x n.
BitMatrix multiply_gf2(const BitMatrix& lhs, const BitMatrix& rhs);

}  // namespace detail

}  // namespace erexp::simulate

#endif  // EREXP_GF_HPP
