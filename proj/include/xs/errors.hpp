#pragma once

#include <stdexcept>
#include <string>

namespace xs {

// Exit codes used by the command-line driver.
enum class ExitCode : int { ok = 0, validation = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode code() const noexcept = 0;
};

class ValidationError : public Error {
public:
    using Error::Error;
    ExitCode code() const noexcept override { return ExitCode::validation; }
};

class NumericalError : public Error {
public:
    using Error::Error;
    ExitCode code() const noexcept override { return ExitCode::numerical; }
};

class IoError : public Error {
public:
    using Error::Error;
    ExitCode code() const noexcept override { return ExitCode::io; }
};

struct NonConvergent : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularJacobian : NumericalError {
    using NumericalError::NumericalError;
};
struct OnBranchCut : NumericalError {
    using NumericalError::NumericalError;
};
struct BranchEscape : NumericalError {
    using NumericalError::NumericalError;
};
struct ComplexRootDetected : NumericalError {
    using NumericalError::NumericalError;
};
struct VariationalViolation : NumericalError {
    using NumericalError::NumericalError;
};

// pivot k of an LDU factorization lost all significant digits
struct SingularMinor : NumericalError {
    int index;
    SingularMinor(int k, const std::string& what) : NumericalError(what), index(k) {}
};

// leading minor k came out <= 0; for bimoment matrices this means the precision is too low
struct NonPositiveMinor : NumericalError {
    int index;
    NonPositiveMinor(int k, const std::string& what) : NumericalError(what), index(k) {}
};

struct OutsideBulk : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace xs
