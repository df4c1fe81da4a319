#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffchain {

// Thrown by the spec-string parsers. `position` is a byte offset into the
// offending input; the message carries it so CLI users can locate the error.
class spec_parse_error : public std::runtime_error {
public:
    spec_parse_error(const std::string& input, std::size_t position, const std::string& what_arg)
        : std::runtime_error("parse error at position " + std::to_string(position) + ": " +
                             what_arg + " (input: \"" + input + "\")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// A computation refused because it would exceed a configured cost bound.
class cost_guard_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace diffchain
