#pragma once

#include <stdexcept>
#include <string>

namespace relaysim {

// Base class for all numerical/domain failures raised by this library.
// Callers that only want "the computation failed" can catch this one.
class RelayError : public std::runtime_error {
public:
    explicit RelayError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public RelayError {
public:
    explicit DimensionMismatch(const std::string& what) : RelayError(what) {}
};

// Raised when a matrix that must be Hermitian positive definite produces a
// non-positive pivot during factorization. Signals a degenerate network
// (e.g. zero local noise combined with zero signal power).
class NotPositiveDefinite : public RelayError {
public:
    explicit NotPositiveDefinite(const std::string& what) : RelayError(what) {}
};

// Raised when the asymmetry of a supposedly Hermitian matrix exceeds the
// library tolerance (see numerics::symmetrized).
class NotHermitian : public RelayError {
public:
    explicit NotHermitian(const std::string& what) : RelayError(what) {}
};

class NoConvergence : public RelayError {
public:
    explicit NoConvergence(const std::string& what) : RelayError(what) {}
};

class ZeroGain : public RelayError {
public:
    explicit ZeroGain(const std::string& what) : RelayError(what) {}
};

class ZeroChannel : public RelayError {
public:
    explicit ZeroChannel(const std::string& what) : RelayError(what) {}
};

class SingularK : public RelayError {
public:
    explicit SingularK(const std::string& what) : RelayError(what) {}
};

class InfeasibleGain : public RelayError {
public:
    explicit InfeasibleGain(const std::string& what) : RelayError(what) {}
};

}  // namespace relaysim
