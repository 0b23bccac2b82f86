#pragma once

#include <vector>

#include "l2betti/rational.hpp"
#include "l2betti/truncation.hpp"

namespace l2betti {

/// Rank over Q of an integer matrix, by fraction-free (Bareiss) elimination.
/// Exact; no floating point involved.
int integer_rank(const SparseInt& m);

/// Rank of a dense big-integer matrix, fraction-free elimination in place.
int integer_rank(std::vector<std::vector<BigInt>> m);

/// Ordinary Betti number over Q of a finite truncation:
/// dim C_n - rank boundary_n - rank boundary_{n+1}.
long betti_number(const Truncation& t, int n);

} // namespace l2betti
