#pragma once

#include <stdexcept>
#include <string>

namespace grassdim {

/// Invalid configuration or malformed input: bad dimensions, unknown keys,
/// unreadable files.  The command line maps this class to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical guard tripped: an estimator was asked to work outside the
/// regime where its output means anything.  The command line maps this
/// class to exit code 2.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

/// Box counts saturated (too close to the atom count) or collapsed (too few
/// occupied cells) at a requested level.
class SaturationError : public GuardError {
 public:
  explicit SaturationError(const std::string& what) : GuardError(what) {}
};

/// A scale sweep did not contain enough usable levels/bands to fit anything.
class InsufficientRangeError : public GuardError {
 public:
  explicit InsufficientRangeError(const std::string& what) : GuardError(what) {}
};

/// A pair of subspaces is too far apart (or numerically singular) for the
/// requested alignment to be meaningful.
class DegeneratePairError : public GuardError {
 public:
  explicit DegeneratePairError(const std::string& what) : GuardError(what) {}
};

/// The evaluation grid is too coarse for the requested smoothing scale.
class ResolutionError : public GuardError {
 public:
  explicit ResolutionError(const std::string& what) : GuardError(what) {}
};

}  // namespace grassdim
