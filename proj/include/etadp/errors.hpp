#pragma once

#include <stdexcept>
#include <string>

namespace etadp {

/// Bad argument to a numeric routine (dimension mismatch, empty range, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A derivative evaluated to a non-finite value during integration.
/// Maps to CLI exit code 3.
class IntegrationFault : public std::runtime_error {
 public:
  IntegrationFault(const std::string& what, double t, int stage)
      : std::runtime_error(what), t_(t), stage_(stage) {}

  double time() const { return t_; }
  // RK4 stage index in [1, 4], or 0 when raised outside a stage.
  int stage() const { return stage_; }

 private:
  double t_;
  int stage_;
};

class PlantEvaluationError : public std::runtime_error {
 public:
  PlantEvaluationError(const std::string& field, const std::string& what)
      : std::runtime_error(what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ObserverFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace etadp
