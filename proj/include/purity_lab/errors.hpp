#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace purity_lab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a state would exceed the configured total-dimension cap.
class DimensionCapError : public Error {
public:
    DimensionCapError(std::size_t requested, std::size_t cap)
        : Error(format(requested, cap)), requested_(requested), cap_(cap) {}

    std::size_t requested() const { return requested_; }
    std::size_t cap() const { return cap_; }

private:
    static std::string format(std::size_t requested, std::size_t cap) {
        std::ostringstream os;
        os << "total dimension " << requested << " exceeds the cap of " << cap;
        return os.str();
    }

    std::size_t requested_;
    std::size_t cap_;
};

// Untrusted input failed a structural check (normalization, Hermiticity,
// trace, positivity, shape, weight sums).
class ValidationError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

struct SourcePos {
    int line = 1;
    int column = 1;
};

// Syntax or static-semantics error in a state expression. Always carries the
// position in the input text and, for pure syntax errors, the token set the
// parser would have accepted.
class ParseError : public Error {
public:
    ParseError(SourcePos pos, const std::string& message,
               std::vector<std::string> expected = {})
        : Error(format(pos, message, expected)),
          pos_(pos),
          message_(message),
          expected_(std::move(expected)) {}

    SourcePos pos() const { return pos_; }
    const std::string& message() const { return message_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    static std::string format(SourcePos pos, const std::string& message,
                              const std::vector<std::string>& expected) {
        std::ostringstream os;
        os << "line " << pos.line << ", column " << pos.column << ": " << message;
        if (!expected.empty()) {
            os << " (expected ";
            for (std::size_t i = 0; i < expected.size(); ++i) {
                if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
                os << expected[i];
            }
            os << ")";
        }
        return os.str();
    }

    SourcePos pos_;
    std::string message_;
    std::vector<std::string> expected_;
};

} // namespace purity_lab
