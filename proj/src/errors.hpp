#pragma once

#include <stdexcept>
#include <string>

namespace oram3 {

/// A protocol invariant was violated at runtime (read-once breach, capacity
/// exhaustion, a truncation that would drop live data, ...). These indicate a
/// caller bug or a broken implementation, never a recoverable condition.
class ProtocolError : public std::runtime_error {
public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace oram3
