#pragma once

#include <stdexcept>
#include <string>

namespace rabinrl {

// Errors caused by malformed or inconsistent user input (files, formulas,
// flags). The CLI maps these to exit code 2; everything else is exit code 1.
struct input_error : std::runtime_error {
  explicit input_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace rabinrl
