#pragma once

#include <stdexcept>
#include <string>

namespace vsm {

/// Bad input: wrong dimension, point off the simplex, negative parameter.
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical routine on otherwise valid input.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct truncation_error : numerical_error {
    using numerical_error::numerical_error;
};

struct inversion_error : numerical_error {
    using numerical_error::numerical_error;
};

struct step_budget_error : numerical_error {
    using numerical_error::numerical_error;
};

struct horizon_error : numerical_error {
    using numerical_error::numerical_error;
};

struct quadrature_error : numerical_error {
    using numerical_error::numerical_error;
};

struct degenerate_subsum_error : numerical_error {
    using numerical_error::numerical_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
    if (!ok) throw domain_error(what);
}
}  // namespace detail

}  // namespace vsm
