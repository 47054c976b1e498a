#include "podsim/petri/distribution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace podsim::petri {

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t span = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % span);
}

double Rng::normal() {
  const double u1 = uniform_positive();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DelayDistribution DelayDistribution::constant(double seconds) {
  if (!(seconds >= 0.0)) throw std::invalid_argument("constant delay must be >= 0");
  DelayDistribution d;
  d.kind_ = Kind::Constant;
  d.a_ = seconds;
  return d;
}

DelayDistribution DelayDistribution::normal_truncated(double mean, double stddev) {
  if (!(stddev >= 0.0)) throw std::invalid_argument("stddev must be >= 0");
  if (stddev == 0.0 && mean < 0.0) {
    throw std::invalid_argument("degenerate truncated normal below zero");
  }
  DelayDistribution d;
  d.kind_ = Kind::NormalTruncated;
  d.a_ = mean;
  d.b_ = stddev;
  return d;
}

DelayDistribution DelayDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
  DelayDistribution d;
  d.kind_ = Kind::Exponential;
  d.a_ = rate;
  return d;
}

DelayDistribution DelayDistribution::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical distribution needs samples");
  for (double s : samples) {
    if (!(s >= 0.0)) throw std::invalid_argument("empirical samples must be >= 0");
  }
  DelayDistribution d;
  d.kind_ = Kind::Empirical;
  d.samples_ = std::move(samples);
  return d;
}

DelayDistribution DelayDistribution::never() {
  DelayDistribution d;
  d.kind_ = Kind::Never;
  return d;
}

std::optional<double> DelayDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant:
      return a_;
    case Kind::NormalTruncated: {
      if (b_ == 0.0) return a_;
      double x;
      do {
        x = a_ + b_ * rng.normal();
      } while (x < 0.0);
      return x;
    }
    case Kind::Exponential:
      return -std::log(rng.uniform_positive()) / a_;
    case Kind::Empirical:
      return samples_[rng.uniform_index(samples_.size())];
    case Kind::Never:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace podsim::petri
