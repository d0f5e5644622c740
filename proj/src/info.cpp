// SPDX-License-Identifier: Apache-2.0
#include "semcomm/info.hpp"

#include <cmath>

namespace semcomm {

double entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

std::vector<double> JointTable::row_marginal() const {
  std::vector<double> out(cells.size(), 0.0);
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (double p : cells[a]) out[a] += p;
  return out;
}

std::vector<double> JointTable::column_marginal() const {
  std::vector<double> out(cells.empty() ? 0 : cells.front().size(), 0.0);
  for (const auto& row : cells)
    for (std::size_t b = 0; b < row.size(); ++b) out[b] += row[b];
  return out;
}

JointTable joint_table(std::span<const Index> a, std::size_t a_count, std::span<const Index> b,
                       std::size_t b_count, std::span<const double> weights) {
  if (a.size() != b.size() || a.size() != weights.size())
    throw PreconditionError("joint table: mismatched variable lengths");
  JointTable joint;
  joint.cells.assign(a_count, std::vector<double>(b_count, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) joint.cells.at(a[i]).at(b[i]) += weights[i];
  return joint;
}

double mutual_information(const JointTable& joint) {
  const auto pa = joint.row_marginal();
  const auto pb = joint.column_marginal();
  double mi = 0.0;
  for (std::size_t a = 0; a < joint.cells.size(); ++a)
    for (std::size_t b = 0; b < joint.cells[a].size(); ++b) {
      const double p = joint.cells[a][b];
      if (p > 0.0) mi += p * std::log(p / (pa[a] * pb[b]));
    }
  return mi < 0.0 ? 0.0 : mi;
}

double conditional_entropy(const JointTable& joint) {
  double h = 0.0;
  for (const auto& row : joint.cells) {
    double mass = 0.0;
    for (double p : row) mass += p;
    if (mass <= 0.0) continue;
    for (double p : row)
      if (p > 0.0) h -= p * std::log(p / mass);
  }
  return h;
}

}  // namespace semcomm
