#pragma once

#include <stdexcept>
#include <string>

namespace advgauss {

/// Caller passed a value outside an operation's domain (bad size, bad range).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a result (singular matrix,
/// failed factorization, non-finite values).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace advgauss
