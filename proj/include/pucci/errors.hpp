#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace pucci {

struct SingularPointError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NonSymmetricError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidBracketError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Existence fails for p at or above the critical exponent.
struct SupercriticalError : std::runtime_error {
    double p;
    explicit SupercriticalError(double p_, const std::string& msg)
        : std::runtime_error(msg), p(p_) {}
};

// Step-size underflow or step budget exhausted; carries the last valid state.
struct IntegrationFailure : std::runtime_error {
    double t_last;
    std::array<double, 2> state_last;
    IntegrationFailure(const std::string& msg, double t, std::array<double, 2> y)
        : std::runtime_error(msg), t_last(t), state_last(y) {}
};

struct InvalidBaseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridFailure : std::runtime_error {
    double epsilon;
    GridFailure(const std::string& msg, double eps)
        : std::runtime_error(msg), epsilon(eps) {}
};

struct NewtonDivergence : std::runtime_error {
    std::vector<double> residual_history;
    NewtonDivergence(const std::string& msg, std::vector<double> hist)
        : std::runtime_error(msg), residual_history(std::move(hist)) {}
};

struct PositivityFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HomotopyFailure : std::runtime_error {
    double s;
    HomotopyFailure(const std::string& msg, double s_)
        : std::runtime_error(msg), s(s_) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pucci
