#pragma once

#include <stdexcept>
#include <string>

namespace cw {

// The measure P is undefined at this n (h_n = 0, so Eq-style quantities
// would divide by zero). Distinct from a usage error: the inputs are valid,
// the model simply has no mass at this size.
class ModelUndefinedError : public std::runtime_error {
  public:
    explicit ModelUndefinedError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation needs a regime hypothesis the weight family does
// not satisfy (or that cannot be certified).
class HypothesisError : public std::runtime_error {
  public:
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cw
