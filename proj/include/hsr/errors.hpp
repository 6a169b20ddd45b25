#pragma once

#include <stdexcept>
#include <string>

namespace hsr {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, validation = 1, degeneracy = 2, internal = 3 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

/// The input violates the scene contract (depth order, degenerate projection, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

class DepthOrderViolation : public ValidationError {
 public:
  DepthOrderViolation(std::size_t farther, std::size_t nearer)
      : ValidationError("depth order violation: triangle " + std::to_string(farther) +
                        " occludes triangle " + std::to_string(nearer)),
        farther_(farther),
        nearer_(nearer) {}
  /// 1-based indices of the offending pair; `farther` has the smaller index.
  std::size_t farther() const { return farther_; }
  std::size_t nearer() const { return nearer_; }

 private:
  std::size_t farther_, nearer_;
};

class DegenerateRay : public ValidationError {
 public:
  DegenerateRay() : ValidationError("point coincides with the viewpoint") {}
};

/// A generator was asked for a size it cannot produce.
class UnsupportedSize : public ValidationError {
 public:
  explicit UnsupportedSize(const std::string& what) : ValidationError("unsupported size: " + what) {}
};

/// General position was violated somewhere the algorithm relies on it.
class DegeneracyDetected : public Error {
 public:
  explicit DegeneracyDetected(const std::string& what)
      : Error(ExitCode::degeneracy, "degeneracy detected: " + what) {}
};

/// An internal data-structure invariant failed (corrupt masks, catalog, ...).
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ExitCode::internal, what) {}
};

class EmptyBlock : public InvariantError {
 public:
  EmptyBlock() : InvariantError("no set bit in block") {}
};

/// A catalog insertion repeats a vertex already stored for that triangle.
class DuplicateVertex : public InvariantError {
 public:
  explicit DuplicateVertex(const std::string& what) : InvariantError("duplicate catalog vertex " + what) {}
};

/// Two catalog vertices of one triangle fall on the same boundary point.
class CyclicOrderViolation : public DegeneracyDetected {
 public:
  explicit CyclicOrderViolation(const std::string& what) : DegeneracyDetected("cyclic order collision at " + what) {}
};

/// A level mask bit is claimed twice within one level.
class MaskConflict : public InvariantError {
 public:
  explicit MaskConflict(const std::string& what) : InvariantError("mask conflict at " + what) {}
};

/// A boundary walk did not return to its start.
class NonClosingWalk : public InvariantError {
 public:
  explicit NonClosingWalk(const std::string& what) : InvariantError("boundary walk does not close: " + what) {}
};

/// A masked vertex was never reached by any boundary walk.
class OrphanVertex : public InvariantError {
 public:
  explicit OrphanVertex(const std::string& what) : InvariantError("orphan boundary vertex: " + what) {}
};

}  // namespace hsr
