// SPDX-License-Identifier: Apache-2.0
#include "semcomm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "semcomm/objectives.hpp"
#include "semcomm/random.hpp"

namespace semcomm {

namespace {

constexpr double kTie = 1e-12;

std::vector<Index> decode(std::uint64_t code, std::size_t n, std::size_t k) {
  std::vector<Index> a(n);
  for (std::size_t i = n; i-- > 0;) {
    a[i] = static_cast<Index>(code % k);
    code /= k;
  }
  return a;
}

struct Shard {
  double best = HUGE_VAL;
  std::vector<std::pair<std::uint64_t, double>> hits;
  std::size_t evaluated = 0;
};

void scan(const InputSpace& space, std::size_t k, const GameSpec& spec, std::uint64_t begin, std::uint64_t end,
          Shard& shard) {
  for (std::uint64_t code = begin; code < end; ++code) {
    const double v = objective_value(Protocol(decode(code, space.size(), k), k), space, spec);
    ++shard.evaluated;
    if (v > shard.best + kTie) continue;
    if (v < shard.best) {
      shard.best = v;
      std::erase_if(shard.hits, [&](const auto& h) { return h.second > v + kTie; });
    }
    shard.hits.emplace_back(code, v);
  }
}

}  // namespace

ExhaustiveResult exhaustive_search(const InputSpace& space, std::size_t message_count, const GameSpec& spec,
                                   const ExhaustiveOptions& options) {
  if (message_count == 0) throw PreconditionError("exhaustive search needs at least one message");
  spec.validate(space.size());
  const double total = std::pow(static_cast<double>(message_count), static_cast<double>(space.size()));
  if (total > options.budget) throw BudgetError("exhaustive search space too large", total, options.budget);
  const auto count = static_cast<std::uint64_t>(std::llround(total));

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, count / 4096)));
  std::vector<Shard> shards(threads);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = count * t / threads;
    const std::uint64_t end = count * (t + 1) / threads;
    pool.emplace_back([&, t, begin, end] {
      try {
        scan(space, message_count, spec, begin, end, shards[t]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExhaustiveResult result;
  result.value = HUGE_VAL;
  for (const auto& s : shards) {
    result.value = std::min(result.value, s.best);
    result.evaluated += s.evaluated;
  }
  std::set<std::vector<Index>> canonical;
  for (const auto& s : shards)
    for (const auto& [code, v] : s.hits) {
      if (v > result.value + kTie) continue;
      Protocol p(decode(code, space.size(), message_count), message_count);
      const Protocol c = canonicalize(p);
      canonical.emplace(c.assignment().begin(), c.assignment().end());
      result.optimal.push_back(std::move(p));
    }
  for (const auto& a : canonical) result.canonical.emplace_back(a, message_count);
  return result;
}

Protocol canonicalize(const Protocol& protocol) {
  std::vector<Index> relabel(protocol.message_count(), protocol.message_count());
  Index next = 0;
  std::vector<Index> out(protocol.input_count());
  for (Index i = 0; i < out.size(); ++i) {
    Index& r = relabel[protocol[i]];
    if (r == protocol.message_count()) r = next++;
    out[i] = r;
  }
  return Protocol(std::move(out), protocol.message_count());
}

namespace {

std::vector<Point> initial_centroids(const InputSpace& space, std::size_t k, const KMeansInit& init) {
  if (const auto* explicit_init = std::get_if<std::vector<Point>>(&init)) {
    if (explicit_init->size() != k) throw PreconditionError("k-means init needs exactly K centroids");
    for (const auto& c : *explicit_init)
      if (c.size() != space.dimension()) throw PreconditionError("k-means centroid dimension differs from the inputs");
    return *explicit_init;
  }
  Rng rng = substream(std::get<RandomInit>(init).seed, "kmeans-init");
  std::vector<Index> order(space.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Point> centroids;
  for (std::size_t i = 0; i < k; ++i) centroids.push_back(space.point(order[i]));
  return centroids;
}

std::vector<Index> nearest(const InputSpace& space, const std::vector<Point>& centroids) {
  std::vector<Index> a(space.size());
  for (Index x = 0; x < space.size(); ++x) {
    double best = HUGE_VAL;
    for (Index c = 0; c < centroids.size(); ++c) {
      const double d = squared_distance(space.point(x), centroids[c]);
      if (d < best - kTie) {
        best = d;
        a[x] = c;
      }
    }
  }
  return a;
}

}  // namespace

KMeansResult kmeans_alternation(const InputSpace& space, std::size_t k, const KMeansInit& init,
                                std::size_t max_iters, double tol) {
  if (k == 0 || k > space.size()) throw PreconditionError("k-means needs 1 <= K <= N");
  std::vector<Point> centroids = initial_centroids(space, k, init);
  std::vector<Index> assignment;
  std::vector<double> trace;
  std::size_t rounds = 0, reseeds = 0;
  bool converged = false;

  while (rounds < max_iters) {
    ++rounds;
    std::vector<Index> next = nearest(space, centroids);
    for (std::size_t guard = 0; guard < k; ++guard) {
      std::vector<std::size_t> sizes(k, 0);
      for (Index m : next) ++sizes[m];
      const auto empty = std::find(sizes.begin(), sizes.end(), 0u);
      if (empty == sizes.end()) break;
      Index far = 0;
      double far_d = -1.0;
      for (Index x = 0; x < space.size(); ++x) {
        const double d = squared_distance(space.point(x), centroids[next[x]]);
        if (d > far_d + kTie) {
          far_d = d;
          far = x;
        }
      }
      centroids[static_cast<std::size_t>(empty - sizes.begin())] = space.point(far);
      ++reseeds;
      next = nearest(space, centroids);
    }
    if (next == assignment) {
      converged = true;
      break;
    }
    assignment = std::move(next);
    const Protocol protocol(assignment, k);
    const ReconstructionReceiver receiver = synchronized_reconstruction_receiver(protocol, space);
    for (Index m = 0; m < k; ++m)
      if (receiver.defined(m)) centroids[m] = receiver.at(m);
    const double value = reco_objective(protocol, space);
    const bool small_step = !trace.empty() && trace.back() - value < tol;
    trace.push_back(value);
    if (small_step) {
      converged = true;
      break;
    }
  }
  Protocol protocol(assignment, k);
  ReconstructionReceiver receiver = synchronized_reconstruction_receiver(protocol, space);
  return KMeansResult{std::move(protocol), std::move(receiver), std::move(trace), rounds, converged, reseeds};
}

PartitionFlavor parse_partition_flavor(std::string_view text) {
  if (text == "greedy-uniform") return PartitionFlavor::GreedyUniform;
  if (text == "adversarial-antipodal") return PartitionFlavor::AdversarialAntipodal;
  throw PreconditionError("unknown partition flavor '" + std::string(text) + "'");
}

Protocol balanced_partition(const InputSpace& space, std::size_t k, PartitionFlavor flavor) {
  if (k == 0) throw PreconditionError("balanced partition needs K >= 1");
  const std::size_t n = space.size();
  std::vector<Index> assignment(n, 0);

  if (flavor == PartitionFlavor::GreedyUniform) {
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return space.weight(a) > space.weight(b); });
    std::vector<double> mass(k, 0.0);
    for (Index x : order) {
      Index lightest = 0;
      for (Index m = 1; m < k; ++m)
        if (mass[m] < mass[lightest] - kTie) lightest = m;
      assignment[x] = lightest;
      mass[lightest] += space.weight(x);
    }
    return Protocol(std::move(assignment), k);
  }

  if (n != 2 * k) throw PreconditionError("adversarial-antipodal partition needs N = 2K");
  if (!space.is_uniform()) throw PreconditionError("adversarial-antipodal partition needs a uniform prior");
  std::vector<bool> used(n, false);
  for (Index m = 0; m < k; ++m) {
    double best = -1.0;
    Index bi = 0, bj = 0;
    for (Index i = 0; i < n; ++i) {
      if (used[i]) continue;
      for (Index j = i + 1; j < n; ++j) {
        if (used[j]) continue;
        const double d = squared_distance(space.point(i), space.point(j));
        if (d > best + kTie) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    used[bi] = used[bj] = true;
    assignment[bi] = assignment[bj] = m;
  }
  return Protocol(std::move(assignment), k);
}

}  // namespace semcomm
