#pragma once

#include <stdexcept>
#include <string>

namespace tvsar {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class IsolatedLocation : public Error {
 public:
  IsolatedLocation(int row, const std::string& msg) : Error(msg), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class MissingData : public Error {
 public:
  using Error::Error;
};

class DiagonalNotZero : public Error {
 public:
  using Error::Error;
};

class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

class SingularWeights : public Error {
 public:
  using Error::Error;
};

class SingularLocalSystem : public Error {
 public:
  SingularLocalSystem(double tau0, const std::string& msg)
      : Error(msg), tau0_(tau0) {}
  double tau0() const { return tau0_; }

 private:
  double tau0_;
};

class InsufficientRegressors : public Error {
 public:
  using Error::Error;
};

class CollinearConstantBlock : public Error {
 public:
  using Error::Error;
};

class InvalidRss : public Error {
 public:
  using Error::Error;
};

class ExplosiveBootstrapDgp : public Error {
 public:
  ExplosiveBootstrapDgp(double max_abs_rho, const std::string& msg)
      : Error(msg), max_abs_rho_(max_abs_rho) {}
  double max_abs_rho() const { return max_abs_rho_; }

 private:
  double max_abs_rho_;
};

class DgpSingular : public Error {
 public:
  using Error::Error;
};

}  // namespace tvsar
