// SPDX-License-Identifier: Apache-2.0
//
// Plug-in information quantities over exact probability tables (nats,
// 0 log 0 := 0).
#pragma once

#include <span>
#include <vector>

#include "semcomm/core.hpp"

namespace semcomm {

double entropy(std::span<const double> probabilities);

/// Dense joint table P(A = a, B = b), rows indexed by a.
struct JointTable {
  std::vector<std::vector<double>> cells;

  std::vector<double> row_marginal() const;
  std::vector<double> column_marginal() const;
};

/// Joint distribution of two integer-valued functions of X.
JointTable joint_table(std::span<const Index> a, std::size_t a_count, std::span<const Index> b,
                       std::size_t b_count, std::span<const double> weights);

double mutual_information(const JointTable& joint);

/// H(B | A) for the table's row variable A.
double conditional_entropy(const JointTable& joint);

}  // namespace semcomm
