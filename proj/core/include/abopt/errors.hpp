#pragma once

#include <stdexcept>
#include <string>

namespace abopt {

// Invalid benchmark/problem configuration, detected before any run starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear-algebra failure that survived jitter escalation or similar recovery.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A learner failed to train on the given configuration.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace abopt
