#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace synthbal {

// Every recoverable failure in the library surfaces as Error with a
// single-line message naming the offending input (line, field, league, ...).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Non-fatal diagnostics. Pass a sink to collect them; nullptr drops them.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string msg) {
  if (sink != nullptr) sink->push_back(std::move(msg));
}

}  // namespace synthbal
