#pragma once

#include <stdexcept>
#include <string>

namespace gbps {

// Requested work exceeds a resource budget (table entries, transform sizes).
// The CLI maps this to exit status 3.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

// Input is structurally valid but carries no usable information: empty sample
// sets, all-zero sequences, arcs with no nodes.
class degenerate_input_error : public std::invalid_argument {
 public:
  explicit degenerate_input_error(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

// A cache or data file does not match the expected binary layout.
class format_error : public std::runtime_error {
 public:
  explicit format_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

// Parameters are individually valid but mutually inconsistent, e.g. a node
// count below the bandwidth needed for exact coefficient extraction.
class configuration_error : public std::invalid_argument {
 public:
  explicit configuration_error(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

}  // namespace gbps
