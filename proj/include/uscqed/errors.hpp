#pragma once

#include <stdexcept>
#include <string>

namespace uscqed {

// Precondition failures on public entry points (bad cutoffs, indices, shapes).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A dressed eigenstate cannot be matched to a bare label with enough weight.
class AmbiguousLabel : public std::runtime_error {
public:
    AmbiguousLabel(const std::string& what, double overlap)
        : std::runtime_error(what), overlap_(overlap) {}
    double overlap() const noexcept { return overlap_; }

private:
    double overlap_;
};

// Avoided-crossing search could not bracket a single minimum.
class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Perturbative path sum hit an intermediate state (near-)degenerate with the initial one.
class DivergentDenominator : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Master-equation integration left the physical state manifold.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// A quantity that must be nonnegative came out meaningfully negative.
class NumericalIntegrity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace uscqed
