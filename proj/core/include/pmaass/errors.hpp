#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pmaass {

// Input that can never be computed with: bad levels, non-coprime pairs,
// arguments outside a function's domain, malformed spec files. Maps to
// CLI exit code 2.
class invalid_input : public std::invalid_argument {
 public:
  invalid_input(std::string kind, const std::string& what)
      : std::invalid_argument(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// A numerical safety rail tripped while the input itself was legal:
// evaluation too close to a pole, a tolerance that cannot be met with the
// requested cutoffs, an ill-conditioned solve. Maps to CLI exit code 3.
class numeric_guard : public std::runtime_error {
 public:
  numeric_guard(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace pmaass
