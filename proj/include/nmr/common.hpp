#pragma once

#include <stdexcept>
#include <string>

namespace nmr {

/// Raised for malformed inputs: bad graph literals, out-of-range ids,
/// invalid world parameters, unparseable scenarios or traces.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nmr
