#pragma once

#include <stdexcept>
#include <string>

namespace surfns {

/// Invalid user input: bad surface parameters, malformed config, bad file.
/// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runtime numerical failure: solver stagnation, closest-point query outside
/// the projection tube, non-finite field values. CLI exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace surfns
