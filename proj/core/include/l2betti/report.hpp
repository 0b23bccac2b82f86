#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l2betti/estimates.hpp"

namespace l2betti {

/// Convergence ledger CSV: header
/// `degree,level_k,level_l,epsilon,value,kind`, rows sorted by
/// (k, l, epsilon descending). Deterministic.
void write_csv(std::ostream& out, const std::vector<LedgerRow>& rows);

/// Same numbers as the CSV, aligned as a text table.
void write_table(std::ostream& out, const std::vector<LedgerRow>& rows);

std::vector<LedgerRow> sorted_rows(std::vector<LedgerRow> rows);

std::string format_value(double v);

} // namespace l2betti
