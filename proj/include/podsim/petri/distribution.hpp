#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace podsim::petri {

/// Deterministic random source. All draws go through explicit transforms of
/// 53-bit uniforms so that a seed fully determines every sample sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_positive() { return 1.0 - uniform(); }

  /// Unbiased uniform index in [0, n).
  std::size_t uniform_index(std::size_t n);

  /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();

 private:
  std::mt19937_64 gen_;
};

/// Delay model attached to a timed transition. Sampling a `never`
/// distribution yields no value: the transition cannot complete and the
/// engine treats it as permanently disabled.
class DelayDistribution {
 public:
  enum class Kind { Constant, NormalTruncated, Exponential, Empirical, Never };

  static DelayDistribution constant(double seconds);
  /// Normal(mean, stddev) truncated at zero by rejection.
  static DelayDistribution normal_truncated(double mean, double stddev);
  static DelayDistribution exponential(double rate);
  /// Uniform resampling from a non-empty list of observed delays.
  static DelayDistribution empirical(std::vector<double> samples);
  static DelayDistribution never();

  Kind kind() const { return kind_; }
  bool is_never() const { return kind_ == Kind::Never; }

  /// Non-negative duration, or nullopt for `never`.
  std::optional<double> sample(Rng& rng) const;

  // Parameter accessors, used by config round-trips and reports.
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  DelayDistribution() = default;

  Kind kind_ = Kind::Constant;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> samples_;
};

}  // namespace podsim::petri
