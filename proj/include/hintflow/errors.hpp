// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hintflow {

/// Precondition violated by a caller-supplied value.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Non-finite value produced during optimization.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible file content.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hintflow
