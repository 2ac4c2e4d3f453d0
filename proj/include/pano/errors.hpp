#pragma once

#include <stdexcept>
#include <string>

namespace pano {

// Bad or inconsistent input (files, shapes, preconditions). CLI exit code 2.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values or degenerate geometry discovered mid-computation.
// CLI exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pano
