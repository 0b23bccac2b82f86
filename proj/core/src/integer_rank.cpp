#include "l2betti/integer_rank.hpp"

#include <utility>

namespace l2betti {

int integer_rank(std::vector<std::vector<BigInt>> m) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  int rank = 0;
  BigInt prev_pivot = 1;
  for (int col = 0; col < cols && rank < rows; ++col) {
    // Pick the absolutely largest pivot in the column; keeps Bareiss growth down.
    int pivot_row = -1;
    BigInt best = 0;
    for (int r = rank; r < rows; ++r) {
      BigInt a = abs(m[r][col]);
      if (a > best) {
        best = a;
        pivot_row = r;
      }
    }
    if (pivot_row < 0) continue;
    std::swap(m[rank], m[pivot_row]);
    const BigInt pivot = m[rank][col];
    for (int r = rank + 1; r < rows; ++r) {
      const BigInt factor = m[r][col];
      for (int c = col; c < cols; ++c) {
        // Exact division, the Bareiss invariant.
        m[r][c] = (m[r][c] * pivot - factor * m[rank][c]) / prev_pivot;
      }
    }
    prev_pivot = pivot;
    ++rank;
  }
  return rank;
}

int integer_rank(const SparseInt& s) {
  std::vector<std::vector<BigInt>> m(s.rows(), std::vector<BigInt>(s.cols(), 0));
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseInt::InnerIterator it(s, k); it; ++it) m[it.row()][it.col()] = it.value();
  return integer_rank(std::move(m));
}

long betti_number(const Truncation& t, int n) {
  if (n < 0 || n > t.dims) return 0;
  const long dim_cn = t.cell_count(n);
  const long rank_dn = (n >= 1) ? integer_rank(t.boundary[n]) : 0;
  const long rank_dn1 = (n + 1 <= t.dims) ? integer_rank(t.boundary[n + 1]) : 0;
  return dim_cn - rank_dn - rank_dn1;
}

} // namespace l2betti
