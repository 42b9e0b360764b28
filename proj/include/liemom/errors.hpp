//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <stdexcept>
#include <string>

namespace liemom {

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(int a, int b)
      : std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

// Some rotation angle sits at pi, where the principal logarithm is not unique.
class AngleAtCut : public std::domain_error {
 public:
  explicit AngleAtCut(double angle)
      : std::domain_error("rotation angle " + std::to_string(angle) + " is at the cut locus (pi)"),
        angle_(angle) {}
  double angle() const { return angle_; }

 private:
  double angle_;
};

class SeriesDivergence : public std::domain_error {
 public:
  explicit SeriesDivergence(double radius)
      : std::domain_error("operator series for p(ad) diverges: |ad|_op = " + std::to_string(radius) +
                          " is not below 2*pi"),
        radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

class NotOrthogonal : public std::invalid_argument {
 public:
  explicit NotOrthogonal(const std::string& what) : std::invalid_argument(what) {}
};

class DegenerateSpectrum : public std::invalid_argument {
 public:
  explicit DegenerateSpectrum(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid parameter values. `field` names the offending configuration entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class TailTooShort : public std::runtime_error {
 public:
  explicit TailTooShort(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientPoints : public std::runtime_error {
 public:
  explicit InsufficientPoints(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace liemom
