// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_ERRORS_HPP
#define QNORM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnorm {

// Error taxonomy shared by every module. The CLI maps these onto exit codes:
// input/domain -> 2, resource -> 3, numeric/diagnostic -> 1.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent inputs (bad dimensions, non-PSD where PSD is
// required, unparseable files).
struct input_error : error {
  using error::error;
};

// Parameter outside its mathematical domain (e.g. Schatten exponent p < 1).
struct domain_error : error {
  using error::error;
};

// Dimension budget exceeded (dense algorithms stop at dimension 64).
struct resource_error : error {
  using error::error;
};

// Non-finite values encountered mid-computation.
struct numeric_error : error {
  using error::error;
};

// A runtime verification failed: non-monotone bisection data, no contraction
// inside the search range, a lower-bound sanity check violated.
struct diagnostic_error : error {
  using error::error;
};

}  // namespace qnorm

#endif  // QNORM_ERRORS_HPP
