#pragma once

#include <stdexcept>
#include <string>

namespace squareful {

/// Process exit codes used by the command line front end.
enum class ExitCode : int {
    ok = 0,
    usage = 1,
    precondition = 2,
    consistency = 3,
    budget = 4,
};

/// Base class of every error raised by the library. Carries the exit code
/// the CLI reports for it.
class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// An argument violated an operation's precondition (zero where nonzero is
/// required, a bound out of the supported range, ...).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(ExitCode::precondition, what) {}
};

/// Two independent computations that must agree did not (e.g. an exact
/// Gauss-sum division left a remainder, a character identification failed).
class ConsistencyError : public Error {
public:
    explicit ConsistencyError(const std::string& what) : Error(ExitCode::consistency, what) {}
};

/// A query would exceed a time or memory budget; raised before work starts.
class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what) : Error(ExitCode::budget, what) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw PreconditionError(what);
}

inline void ensure(bool ok, const std::string& what)
{
    if (!ok) throw ConsistencyError(what);
}

} // namespace squareful
