// SPDX-License-Identifier: Apache-2.0
#include "semcomm/generators.hpp"

#include <algorithm>
#include <numeric>

#include "semcomm/consistency.hpp"

namespace semcomm {

InputSpace random_input_space(Rng& rng, const InstanceLimits& limits) {
  if (limits.max_inputs < 2 || limits.max_dimension < 1) throw PreconditionError("instance limits too small");
  std::uniform_int_distribution<std::size_t> n_dist(2, limits.max_inputs);
  std::uniform_int_distribution<std::size_t> dim_dist(1, limits.max_dimension);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  const std::size_t n = n_dist(rng);
  const std::size_t dim = dim_dist(rng);
  std::vector<Point> points(n, Point(dim));
  for (auto& p : points)
    for (double& c : p) c = coord(rng);
  if (limits.uniform) return InputSpace::uniform(std::move(points));
  std::uniform_real_distribution<double> raw(0.1, 1.0);
  std::vector<double> weights(n);
  for (double& w : weights) w = raw(rng);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return InputSpace(std::move(points), std::move(weights));
}

Protocol random_protocol(Rng& rng, std::size_t inputs, std::size_t max_messages) {
  if (max_messages < 1) throw PreconditionError("max_messages must be positive");
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_messages)(rng);
  std::uniform_int_distribution<Index> pick(0, k - 1);
  std::vector<Index> assignment(inputs);
  for (auto& m : assignment) m = pick(rng);
  return Protocol(std::move(assignment), k);
}

RandomInstance random_instance(std::uint64_t seed, std::uint64_t index, const InstanceLimits& limits) {
  Rng rng = substream(seed, "instance", index);
  InputSpace space = random_input_space(rng, limits);
  Protocol protocol = random_protocol(rng, space.size(), limits.max_messages);
  return RandomInstance{std::move(space), std::move(protocol)};
}

LabelMap random_balanced_labels(Rng& rng, std::size_t inputs, std::size_t label_count) {
  if (label_count < 1 || inputs % label_count != 0)
    throw PreconditionError("label count must divide the number of inputs");
  std::vector<Index> labels(inputs);
  for (Index i = 0; i < inputs; ++i) labels[i] = i % label_count;
  std::shuffle(labels.begin(), labels.end(), rng);
  return LabelMap(std::move(labels));
}

ClusteredReceiverInstance random_clustered_receiver(std::uint64_t seed, std::uint64_t index) {
  Rng rng = substream(seed, "clustered-receiver", index);
  constexpr double kEpsilon0 = 1.0;
  for (std::size_t attempt = 1; attempt <= 1000; ++attempt) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(17, 24)(rng);
    std::uniform_real_distribution<double> gap(1.0, 1.3);
    std::vector<double> message_pos(k, 0.0);
    for (std::size_t m = 1; m < k; ++m) message_pos[m] = message_pos[m - 1] + gap(rng);

    // Output spacing s per unit of message distance; simplicity needs
    // s <= k_const, which scales like s * K / sqrt(12).
    const double scale = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    std::normal_distribution<double> jitter(0.0, 0.01 * scale);
    std::vector<std::optional<Point>> outputs(k);
    std::vector<Point> points;
    std::uniform_int_distribution<std::size_t> per_cluster(1, 3);
    for (std::size_t m = 0; m < k; ++m) {
      const double center = scale * message_pos[m] + jitter(rng);
      outputs[m] = Point{center};
      for (std::size_t j = per_cluster(rng); j > 0; --j) points.push_back(Point{center + 5.0 * jitter(rng)});
    }
    std::vector<Point> vectors;
    for (double v : message_pos) vectors.push_back(Point{v});

    InputSpace space = InputSpace::uniform(std::move(points));
    MessageSpace messages = MessageSpace::euclidean(std::move(vectors));
    ReconstructionReceiver receiver(std::move(outputs));

    const auto simple = receiver_simplicity(receiver_table(receiver), messages, space, kEpsilon0);
    if (!simple.simple) continue;
    GameSpec spec;
    spec.kind = GameKind::Reconstruction;
    if (!non_degeneracy(receiver, space, spec).non_degenerate) continue;
    return ClusteredReceiverInstance{std::move(space), std::move(messages), std::move(receiver), kEpsilon0, attempt};
  }
  throw Error("no simple non-degenerate receiver found in 1000 attempts");
}

}  // namespace semcomm
