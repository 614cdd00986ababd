#pragma once

#include <stdexcept>

namespace homtk {

// Unphysical parameters or structurally invalid inputs.
struct domain_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inputs are valid but too coarse for the requested accuracy.
struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace homtk
