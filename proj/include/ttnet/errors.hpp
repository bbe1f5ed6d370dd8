#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ttnet {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed network description (parse-time).
class SpecParseError : public Error {
public:
    using Error::Error;
};

/// A state component sits exactly on a threshold where the step model is undefined.
class OnThresholdError : public Error {
public:
    OnThresholdError(std::size_t gene, std::size_t level, const std::string& what)
        : Error(what), gene_(gene), level_(level) {}
    [[nodiscard]] std::size_t gene() const noexcept { return gene_; }
    [[nodiscard]] std::size_t level() const noexcept { return level_; }

private:
    std::size_t gene_;
    std::size_t level_;
};

/// Two adjacent pseudo-states with an undirected (degenerate) boundary.
class UndirectedEdgeError : public Error {
public:
    UndirectedEdgeError(std::size_t gene, std::size_t boundary, const std::string& what)
        : Error(what), gene_(gene), boundary_(boundary) {}
    [[nodiscard]] std::size_t gene() const noexcept { return gene_; }
    [[nodiscard]] std::size_t boundary() const noexcept { return boundary_; }

private:
    std::size_t gene_;
    std::size_t boundary_;
};

/// Interaction graph is not a single directed cycle.
class NotALoopError : public Error {
public:
    NotALoopError(std::size_t gene, const std::string& what) : Error(what), gene_(gene) {}
    [[nodiscard]] std::size_t gene() const noexcept { return gene_; }

private:
    std::size_t gene_;
};

/// Root finding, eigenvalue iteration or cross-check failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Adaptive integrator could not make progress.
class SmoothIntegrationError : public NumericalError {
public:
    SmoothIntegrationError(double t, const std::string& what) : NumericalError(what), time_(t) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace ttnet
