#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lda {

// Sizes of states, masks or instances do not agree.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A size guard (exhaustive enumeration, dense simulation) was exceeded.
struct capability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct degenerate_gap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw dimension_error(std::string(what) + ": size " + std::to_string(a) +
                          " does not match " + std::to_string(b));
  }
}

}  // namespace detail
}  // namespace lda
