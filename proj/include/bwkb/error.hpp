#pragma once

#include <stdexcept>
#include <string>

namespace bwkb {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class EigensolverFailure : public Error {
 public:
  using Error::Error;
};

// A band gap (or a divisor E_m - E_n) fell below the isolation tolerance.
class IsolatednessViolation : public Error {
 public:
  IsolatednessViolation(const std::string& what, double gap, double k)
      : Error(what), gap_(gap), k_(k) {}
  double gap() const noexcept { return gap_; }
  double k() const noexcept { return k_; }

 private:
  double gap_;
  double k_;
};

// Requested time is at or beyond the first caustic of the ray bundle.
class PostCaustic : public Error {
 public:
  PostCaustic(const std::string& what, double caustic_time)
      : Error(what), caustic_time_(caustic_time) {}
  double caustic_time() const noexcept { return caustic_time_; }

 private:
  double caustic_time_;
};

// The field reached the edge of the periodic box.
class EdgeLeakage : public Error {
 public:
  EdgeLeakage(const std::string& what, double time, double magnitude)
      : Error(what), time_(time), magnitude_(magnitude) {}
  double time() const noexcept { return time_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  double time_;
  double magnitude_;
};

// Complex-coupling run diverged; last_valid_time is the last completed step.
class Overflow : public Error {
 public:
  Overflow(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace bwkb
