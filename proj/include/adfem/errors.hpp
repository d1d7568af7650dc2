#ifndef ADFEM_ERRORS_HPP
#define ADFEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adfem {

/// Misuse of the assembly->solver buffer lease protocol.
class LeaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An operator was used after the buffer it was built from was re-assembled.
class StaleEpochError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested capability is not available for this operator kind
/// (e.g. ILU or a direct factorization on a matrix-free operator).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Preconditioner or direct-factorization setup failure (zero pivot, not SPD).
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// det F <= 0 inside a finite-strain constitutive evaluation.
class InvertedElementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adfem

#endif  // ADFEM_ERRORS_HPP
