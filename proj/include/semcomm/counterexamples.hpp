// SPDX-License-Identifier: Apache-2.0
//
// Explicit proof instances: the discrimination receiver whose synchronized
// sender explains no variance, and optimal discrimination protocols that are
// not semantically consistent.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semcomm/consistency.hpp"

namespace semcomm {

/// Inputs 1..6 then -1..-6 (uniform), scalar messages 1..6 at indices 0..5,
/// A_k = {k, -k}. The receiver is a dense 6 x 12 x 12 table: (0.5, 0.5) when
/// both candidates share a set or neither lies in A_m, otherwise a point mass
/// on the candidate in A_m. The sender maps +-k to message k.
struct SpatialCounterexample {
  InputSpace space;
  MessageSpace messages;
  std::vector<double> table;
  DiscriminationReceiver receiver;
  Protocol sender;
  double epsilon0 = 1.0;
};

SpatialCounterexample build_spatial_counterexample();

struct VerificationStep {
  std::string id;
  std::string claim;
  bool passed = false;
  std::map<std::string, double> values;
  std::string detail;
};

struct VerificationReport {
  std::string which;
  std::vector<VerificationStep> steps;
  bool passed() const;
  const VerificationStep& step(const std::string& id) const;
};

/// Steps a..g: simplicity, synchronized sender, synchronized loss,
/// non-degeneracy, optimality by uniform masses, semantic consistency and
/// spatial meaningfulness.
VerificationReport verify_spatial_counterexample();

/// Antipodal pairing of a uniform space with N = 2K.
Protocol build_anticonsistent_optimal(const InputSpace& space, std::size_t k);

/// Checks that the antipodal protocol attains the exhaustive d = 2
/// discrimination optimum while failing semantic consistency, and that the
/// best reconstruction protocols are consistent.
VerificationReport verify_anticonsistent_optimal(const InputSpace& space, std::size_t k);

/// Uniform {0, 1, 2, 3} in one dimension.
InputSpace four_point_line();

}  // namespace semcomm
