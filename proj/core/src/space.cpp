#include "abopt/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abopt {
namespace {

double to_internal(const DimSpec& d, double x) {
  return d.scale == DimScale::log ? std::log(x) : x;
}

double from_internal(const DimSpec& d, double t) {
  return d.scale == DimScale::log ? std::exp(t) : t;
}

}  // namespace

HyperParamSpace::HyperParamSpace(std::vector<DimSpec> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("HyperParamSpace: no dimensions");
  for (const DimSpec& d : dims_) {
    if (!(d.lower < d.upper)) {
      throw std::invalid_argument("HyperParamSpace: dim '" + d.name +
                                  "' requires lower < upper");
    }
    if (d.scale == DimScale::log && !(d.lower > 0.0)) {
      throw std::invalid_argument("HyperParamSpace: log dim '" + d.name +
                                  "' requires lower > 0");
    }
  }
}

bool HyperParamSpace::contains(const HyperParamConfig& config) const {
  if (static_cast<int>(config.values.size()) != size()) return false;
  for (int j = 0; j < size(); ++j) {
    const DimSpec& d = dims_[static_cast<size_t>(j)];
    const double x = config.values[static_cast<size_t>(j)];
    if (!(x >= d.lower && x <= d.upper)) return false;
    if (d.kind == DimKind::integer && x != std::floor(x)) return false;
  }
  return true;
}

Eigen::VectorXd HyperParamSpace::normalize(const HyperParamConfig& config) const {
  if (static_cast<int>(config.values.size()) != size()) {
    throw std::invalid_argument("normalize: dimension mismatch");
  }
  Eigen::VectorXd u(size());
  for (int j = 0; j < size(); ++j) {
    const DimSpec& d = dims_[static_cast<size_t>(j)];
    const double lo = to_internal(d, d.lower);
    const double hi = to_internal(d, d.upper);
    u(j) = (to_internal(d, config.values[static_cast<size_t>(j)]) - lo) / (hi - lo);
  }
  return u;
}

HyperParamConfig HyperParamSpace::denormalize(const Eigen::VectorXd& u) const {
  if (static_cast<int>(u.size()) != size()) {
    throw std::invalid_argument("denormalize: dimension mismatch");
  }
  HyperParamConfig config;
  config.values.resize(static_cast<size_t>(size()));
  for (int j = 0; j < size(); ++j) {
    const DimSpec& d = dims_[static_cast<size_t>(j)];
    const double t = std::clamp(u(j), 0.0, 1.0);
    const double lo = to_internal(d, d.lower);
    const double hi = to_internal(d, d.upper);
    double x = from_internal(d, lo + t * (hi - lo));
    if (d.kind == DimKind::integer) x = round_half_down(x);
    x = std::clamp(x, d.lower, d.upper);
    config.values[static_cast<size_t>(j)] = x;
  }
  return config;
}

HyperParamConfig HyperParamSpace::sample_uniform(Rng& rng) const {
  HyperParamConfig config;
  config.values.resize(static_cast<size_t>(size()));
  for (int j = 0; j < size(); ++j) {
    const DimSpec& d = dims_[static_cast<size_t>(j)];
    double x;
    if (d.kind == DimKind::integer && d.scale == DimScale::linear) {
      x = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(d.lower),
                                              static_cast<std::int64_t>(d.upper)));
    } else {
      const double lo = to_internal(d, d.lower);
      const double hi = to_internal(d, d.upper);
      x = from_internal(d, rng.uniform(lo, hi));
      if (d.kind == DimKind::integer) x = std::clamp(round_half_down(x), d.lower, d.upper);
    }
    config.values[static_cast<size_t>(j)] = x;
  }
  return config;
}

int History::finite_count() const {
  int n = 0;
  for (const Record& r : records) {
    if (std::isfinite(r.risk)) ++n;
  }
  return n;
}

std::vector<const History::Record*> History::finite_records() const {
  std::vector<const Record*> out;
  out.reserve(records.size());
  for (const Record& r : records) {
    if (std::isfinite(r.risk)) out.push_back(&r);
  }
  return out;
}

int History::argmin_finite() const {
  int best = -1;
  double best_risk = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double risk = records[static_cast<size_t>(i)].risk;
    if (std::isfinite(risk) && risk < best_risk) {
      best_risk = risk;
      best = i;
    }
  }
  return best;
}

}  // namespace abopt
