#pragma once

// Random parallelotopes spanned by d independent vectors drawn from
// distributions with E[x x^T] = Id. For any such choice E[det^2] = d!; for
// unit-vector atoms of an isotropic system drawn with P(u_i) = c_i/d the same
// identity reads E[det^2] = d!/d^d.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "isovec/bounds.hpp"
#include "isovec/combinatorics.hpp"
#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/random.hpp"
#include "isovec/systems.hpp"

namespace isovec {

/// Source of random d-vectors with identity second moment.
class Sampler {
 public:
  enum class Kind { Gaussian, Sphere, Discrete };

  /// Standard Gaussian in R^d.
  static Sampler gaussian(std::size_t d) { return Sampler(Kind::Gaussian, d); }

  /// Uniform on the sphere of radius sqrt(d).
  static Sampler sphere(std::size_t d) { return Sampler(Kind::Sphere, d); }

  /// Atom sqrt(d) u_i with probability c_i / d. With unit_atoms the atoms are
  /// the u_i themselves (the index distribution used by the tail estimates).
  static Sampler discrete(const WeightedVectorSystem& system, bool unit_atoms = false) {
    Sampler s(Kind::Discrete, system.dim());
    const double scale = unit_atoms ? 1.0 : std::sqrt(static_cast<double>(system.dim()));
    double acc = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
      Vector a(system.vector(i));
      for (double& x : a) x *= scale;
      s.atoms_.push_back(std::move(a));
      acc += system.weight(i) / static_cast<double>(system.dim());
      s.cumulative_.push_back(acc);
    }
    for (double& c : s.cumulative_) c /= acc;
    s.cumulative_.back() = 1.0;
    return s;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::string name() const {
    switch (kind_) {
      case Kind::Gaussian: return "gaussian";
      case Kind::Sphere: return "sphere";
      case Kind::Discrete: return "discrete";
    }
    return "";
  }

  /// Index of a discrete draw.
  template <typename Rng>
  std::size_t draw_index(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
  }

  template <typename Rng>
  void draw(Rng& rng, std::span<double> out) const {
    switch (kind_) {
      case Kind::Gaussian: {
        std::normal_distribution<double> g;
        for (double& x : out) x = g(rng);
        return;
      }
      case Kind::Sphere: {
        std::normal_distribution<double> g;
        double n2 = 0.0;
        do {
          n2 = 0.0;
          for (double& x : out) {
            x = g(rng);
            n2 += x * x;
          }
        } while (n2 == 0.0);
        const double s = std::sqrt(static_cast<double>(dim_) / n2);
        for (double& x : out) x *= s;
        return;
      }
      case Kind::Discrete: {
        const Vector& a = atoms_[draw_index(rng)];
        std::copy(a.begin(), a.end(), out.begin());
        return;
      }
    }
  }

 private:
  Sampler(Kind k, std::size_t d) : kind_(k), dim_(d) {
    if (d == 0) throw InvalidArgument("Sampler: dimension must be positive");
  }

  Kind kind_;
  std::size_t dim_;
  std::vector<Vector> atoms_;
  Vector cumulative_;
};

struct ExperimentRecord {
  std::string kind;
  std::size_t dim = 0;
  std::optional<std::size_t> m;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  std::optional<double> exact_reference;
  std::optional<double> threshold;
};

namespace detail {

inline constexpr std::size_t kChunkTrials = 4096;

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  // Chan et al. pairwise merge.
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / n;
    m2 += o.m2 + delta * delta * count * o.count / n;
    count = n;
  }
};

// Runs trial(stream) for trials 0..n-1, each with its own CounterStream, and
// folds per-chunk moments in chunk order so the result does not depend on
// the number of threads.
template <typename Trial>
Moments run_trials(std::size_t trials, std::uint64_t seed, std::size_t threads, Trial&& trial) {
  const std::size_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Moments> partial(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      Moments acc;
      const std::size_t end = std::min(trials, (c + 1) * kChunkTrials);
      for (std::size_t t = c * kChunkTrials; t < end; ++t) {
        CounterStream rng(seed, t);
        acc.add(trial(rng));
      }
      partial[c] = acc;
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, chunks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  Moments total;
  for (const Moments& p : partial) total.merge(p);
  return total;
}

inline double standard_error(const Moments& m) {
  if (m.count < 2.0) return 0.0;
  return std::sqrt(m.m2 / (m.count - 1.0) / m.count);
}

}  // namespace detail

/// Monte Carlo estimate of E[det(x_1, ..., x_d)^2] with x_l drawn from
/// samplers[l]. Bit-identical for a given (samplers, trials, seed) whatever
/// the thread count.
inline ExperimentRecord estimate_expected_det2(const std::vector<Sampler>& samplers, std::size_t trials,
                                               std::uint64_t seed, std::size_t threads = 1) {
  if (samplers.empty()) throw InvalidArgument("estimate_expected_det2: no samplers");
  const std::size_t d = samplers.front().dim();
  if (samplers.size() != d) throw DimensionError("estimate_expected_det2: need one sampler per column");
  for (const Sampler& s : samplers)
    if (s.dim() != d) throw DimensionError("estimate_expected_det2: samplers differ in dimension");
  if (trials < 100) throw InvalidArgument("estimate_expected_det2: need at least 100 trials");

  const auto moments = detail::run_trials(trials, seed, threads, [&](CounterStream& rng) {
    Matrix x(d, d);
    Vector col(d);
    for (std::size_t j = 0; j < d; ++j) {
      samplers[j].draw(rng, col);
      for (std::size_t i = 0; i < d; ++i) x(i, j) = col[i];
    }
    const double dt = det(std::move(x));
    return dt * dt;
  });

  ExperimentRecord rec;
  rec.kind = samplers.front().name();
  for (const Sampler& s : samplers)
    if (s.name() != rec.kind) rec.kind = "mixed";
  rec.dim = d;
  rec.seed = seed;
  rec.trials = trials;
  rec.estimate = moments.mean;
  rec.standard_error = detail::standard_error(moments);
  return rec;
}

inline ExperimentRecord estimate_expected_det2(const Sampler& sampler, std::size_t trials, std::uint64_t seed,
                                               std::size_t threads = 1) {
  return estimate_expected_det2(std::vector<Sampler>(sampler.dim(), sampler), trials, seed, threads);
}

inline constexpr double kSubsetEnumerationGuard = 1e6;
inline constexpr double kTupleEnumerationGuard = 1e7;

/// Exact E[det(u_{i_1}, ..., u_{i_d})^2] for i.i.d. indices with P(i) = c_i/d:
/// d! sum over d-subsets S of prod_{i in S} (c_i/d) det(S)^2. Tuples with a
/// repeated index have det 0 and drop out.
inline double exact_expected_det2(const WeightedVectorSystem& system) {
  const std::size_t d = system.dim(), m = system.size();
  if (binomial(m, d) > kSubsetEnumerationGuard)
    throw TooLargeError("exact_expected_det2: C(m, d) exceeds the enumeration guard of 1e6");
  const Vector p = system.probabilities();
  double sum = 0.0;
  Matrix cols(d, d);
  for_each_subset(m, d, [&](const std::vector<std::size_t>& idx) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      w *= p[idx[j]];
      for (std::size_t i = 0; i < d; ++i) cols(i, j) = system.vector(idx[j])[i];
    }
    const double dt = det(cols);
    sum += w * dt * dt;
  });
  return factorial(d) * sum;
}

/// Exact P(det^2 >= threshold) under i.i.d. index draws with P(i) = c_i/d.
inline double tail_exact(const WeightedVectorSystem& system, double threshold) {
  if (threshold <= 0.0) return 1.0;
  const std::size_t d = system.dim(), m = system.size();
  const Vector p = system.probabilities();
  Matrix cols(d, d);
  auto det2 = [&](const std::vector<std::size_t>& idx) {
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) cols(i, j) = system.vector(idx[j])[i];
    const double dt = det(cols);
    return dt * dt;
  };

  if (binomial(m, d) <= kSubsetEnumerationGuard) {
    double prob = 0.0;
    for_each_subset(m, d, [&](const std::vector<std::size_t>& idx) {
      if (det2(idx) < threshold) return;
      double w = 1.0;
      for (std::size_t i : idx) w *= p[i];
      prob += w;
    });
    return factorial(d) * prob;
  }
  if (std::pow(static_cast<double>(m), static_cast<double>(d)) <= kTupleEnumerationGuard) {
    std::vector<std::size_t> idx(d, 0);
    double prob = 0.0;
    while (true) {
      if (det2(idx) >= threshold) {
        double w = 1.0;
        for (std::size_t i : idx) w *= p[i];
        prob += w;
      }
      std::size_t k = 0;
      while (k < d && ++idx[k] == m) idx[k++] = 0;
      if (k == d) break;
    }
    return prob;
  }
  throw TooLargeError("tail_exact: system too large to enumerate");
}

/// lambda * gamma(d, m_bar) * d!/d^d: the level that a random d-tuple
/// exceeds with probability at least (1 - lambda) e^{-d}.
inline double tail_threshold(std::size_t d, std::size_t m, double lambda) {
  return lambda * (gamma(d, m) * dr_volume_bound(d)).value();
}

/// Monte Carlo estimate of P(det(u_{i_1}, ..., u_{i_d})^2 >= lambda gamma d!/d^d).
/// The exact reference is filled in whenever the system is small enough to
/// enumerate.
inline ExperimentRecord tail_probability(const WeightedVectorSystem& system, double lambda, std::size_t trials,
                                         std::uint64_t seed, std::size_t threads = 1) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("tail_probability: lambda must lie in (0, 1)");
  if (trials < 1000) throw InvalidArgument("tail_probability: need at least 1000 trials");
  if (!check(system, 1e-8).is_isotropic)
    throw PreconditionError("tail_probability: system is not isotropic at tolerance 1e-8");
  const std::size_t d = system.dim(), m = system.size();
  const double threshold = tail_threshold(d, m, lambda);
  const Sampler sampler = Sampler::discrete(system, /*unit_atoms=*/true);

  const auto moments = detail::run_trials(trials, seed, threads, [&](CounterStream& rng) {
    Matrix x(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      const Vector& u = system.vector(sampler.draw_index(rng));
      for (std::size_t i = 0; i < d; ++i) x(i, j) = u[i];
    }
    const double dt = det(std::move(x));
    return dt * dt >= threshold ? 1.0 : 0.0;
  });

  ExperimentRecord rec;
  rec.kind = "tail";
  rec.dim = d;
  rec.m = m;
  rec.seed = seed;
  rec.trials = trials;
  rec.estimate = moments.mean;
  rec.standard_error = detail::standard_error(moments);
  rec.threshold = threshold;
  try {
    rec.exact_reference = tail_exact(system, threshold);
  } catch (const TooLargeError&) {
  }
  return rec;
}

}  // namespace isovec
