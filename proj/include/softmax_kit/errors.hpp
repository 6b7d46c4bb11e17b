#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace softmax_kit {

/// Precondition on shapes, counts or configuration violated by the caller.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input values outside the domain an operation accepts (non-finite logits,
/// non-positive normalizers, exp arguments outside the approximation range).
class NumericDomainError : public std::domain_error {
 public:
  explicit NumericDomainError(const std::string& what,
                              std::optional<std::size_t> row = std::nullopt)
      : std::domain_error(what), row_(row) {}

  /// Row index of the offending element, when the error concerns a matrix.
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  std::optional<std::size_t> row_;
};

/// Allocation failure.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace softmax_kit
