#pragma once

#include <stdexcept>
#include <string>

namespace affsph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the declared open domain box.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested derivative order not supported.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// A jet computation produced NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Value-part pivot of a linear system fell below the singularity threshold.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Transversal frame {f_*d_1, ..., f_*d_m, C} is not a basis.
class FrameError : public Error {
 public:
  using Error::Error;
};

/// Second fundamental form is (numerically) degenerate.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a Blaschke (affine normal) field.
class NotBlaschkeError : public Error {
 public:
  using Error::Error;
};

/// J~C is not tangent to the hypersurface.
class NotJTangentError : public Error {
 public:
  using Error::Error;
};

/// Dimension of the J~-invariant distribution differs from 2n.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Codimension-two normalization only handles radial fields zeta = -c g.
class NonCentroAffineError : public Error {
 public:
  using Error::Error;
};

class UnknownFamilyError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace affsph
