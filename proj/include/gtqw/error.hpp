#ifndef GTQW_ERROR_HPP
#define GTQW_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gtqw {

/// Base class for every error raised by the library. The exit code is the
/// process status the command-line front end reports for this error class.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}

    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

/// Invalid argument values (B < 2, negative time, empty grid, ...).
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(what, 2) {}
};

/// The seeded gluing sampler could not produce a simple graph within budget.
class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& what) : Error(what, 3) {}
};

/// Eigensolver or Krylov iteration failed to converge.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what, 3) {}
};

/// No local maximum before the configured search horizon.
class SearchError : public Error {
public:
    explicit SearchError(const std::string& what) : Error(what, 3) {}
};

/// A waveguide layout cannot realize the requested couplings.
class DesignError : public Error {
public:
    explicit DesignError(const std::string& what) : Error(what, 2) {}
};

/// File access or malformed input files.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what, 4) {}
};

}  // namespace gtqw

#endif
