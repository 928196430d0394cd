#pragma once

#include <stdexcept>
#include <string>

namespace rankcut {

/// Malformed or inconsistent caller input (bad indices, overlapping sets, unreadable files).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A selection configuration that cannot be realised (zero coefficients, unknown targets, ...).
class ConfigError : public InputError {
public:
    explicit ConfigError(const std::string& what) : InputError(what) {}
};

/// A model that violates structural assumptions (e.g. a latent with fewer than two measurements).
class ModelError : public InputError {
public:
    explicit ModelError(const std::string& what) : InputError(what) {}
};

/// Numerical or statistical failure: singular systems, infeasible rejection sampling.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleSelection : public NumericalError {
public:
    explicit InfeasibleSelection(const std::string& what) : NumericalError(what) {}
};

class DegenerateSelection : public NumericalError {
public:
    explicit DegenerateSelection(const std::string& what) : NumericalError(what) {}
};

/// A conditional-independence oracle failed while answering a query.
class OracleError : public NumericalError {
public:
    explicit OracleError(const std::string& what) : NumericalError(what) {}
};

}  // namespace rankcut
