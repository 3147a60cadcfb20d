#pragma once

#include <stdexcept>
#include <string>

namespace interlink {

// Bad caller input: wrong argument ranges, inconsistent options. CLI exit code 2.
struct argument_error : std::invalid_argument {
    explicit argument_error(const std::string& what) : std::invalid_argument(what) {}
};

// Mathematically inadmissible input or a failed numerical procedure. CLI exit code 3.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

struct malformed_complex_error : domain_error {
    explicit malformed_complex_error(const std::string& what) : domain_error(what) {}
};

struct degenerate_input_error : domain_error {
    explicit degenerate_input_error(const std::string& what) : domain_error(what) {}
};

// The energy functional is not Morse for this input (conjugate endpoints).
struct non_morse_error : domain_error {
    explicit non_morse_error(const std::string& what) : domain_error(what) {}
};

struct not_separating_error : domain_error {
    explicit not_separating_error(const std::string& what) : domain_error(what) {}
};

// A stated hypothesis (e.g. the bar-ratio condition b/a <= C) fails on the inputs.
struct hypothesis_error : domain_error {
    explicit hypothesis_error(const std::string& what) : domain_error(what) {}
};

struct no_convergence_error : domain_error {
    explicit no_convergence_error(const std::string& what, double best_residual)
        : domain_error(what), best_residual(best_residual) {}
    double best_residual;
};

struct step_failure_error : domain_error {
    explicit step_failure_error(const std::string& what) : domain_error(what) {}
};

} // namespace interlink
