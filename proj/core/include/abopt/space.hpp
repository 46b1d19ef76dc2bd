#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "abopt/rng.hpp"

namespace abopt {

enum class DimKind { continuous, integer };
enum class DimScale { linear, log };

struct DimSpec {
  std::string name;
  DimKind kind = DimKind::continuous;
  DimScale scale = DimScale::linear;
  double lower = 0.0;
  double upper = 1.0;
};

// A point of the search domain in native (unnormalized) units. Integer
// dimensions hold integral values stored as doubles.
struct HyperParamConfig {
  std::vector<double> values;

  friend bool operator==(const HyperParamConfig& a, const HyperParamConfig& b) {
    return a.values == b.values;
  }
  friend auto operator<=>(const HyperParamConfig& a, const HyperParamConfig& b) {
    return a.values <=> b.values;
  }
};

// The search domain: a box with per-dimension kind (continuous/integer) and
// scale (linear/log). Log dimensions are log-transformed before the map to the
// unit cube, so GP length scales see a homogeneous geometry.
class HyperParamSpace {
 public:
  HyperParamSpace() = default;
  explicit HyperParamSpace(std::vector<DimSpec> dims);

  int size() const { return static_cast<int>(dims_.size()); }
  const std::vector<DimSpec>& dims() const { return dims_; }
  const DimSpec& dim(int j) const { return dims_[static_cast<size_t>(j)]; }

  bool contains(const HyperParamConfig& config) const;

  // Map to/from the unit cube. denormalize clamps to [0,1] first and snaps
  // integer dimensions (ties round down).
  Eigen::VectorXd normalize(const HyperParamConfig& config) const;
  HyperParamConfig denormalize(const Eigen::VectorXd& u) const;

  // Per-scale uniform sampling: linear dims uniform in [lo, hi], log dims
  // log-uniform, integer dims uniform over the integer grid.
  HyperParamConfig sample_uniform(Rng& rng) const;

 private:
  std::vector<DimSpec> dims_;
};

// Rounds to the nearest integer with exact halves rounding down.
inline double round_half_down(double x) { return std::ceil(x - 0.5); }

// The evaluation record set driving one optimization run. Failed trainings are
// kept as +inf sentinels so budget accounting stays exact; finite_* helpers
// give the view the GP consumes.
struct History {
  struct Record {
    HyperParamConfig config;
    double risk = 0.0;
  };

  std::vector<Record> records;

  int size() const { return static_cast<int>(records.size()); }
  bool empty() const { return records.empty(); }
  void add(HyperParamConfig config, double risk) {
    records.push_back({std::move(config), risk});
  }

  int finite_count() const;
  std::vector<const Record*> finite_records() const;

  // Index of the minimum finite risk, earliest record winning ties; -1 when
  // no finite record exists.
  int argmin_finite() const;
};

}  // namespace abopt
