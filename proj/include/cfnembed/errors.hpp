// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_ERRORS_HPP
#define CFNEMBED_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cfn {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid topology, workload or scenario configuration.
class ConfigError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// Caller supplied inconsistent data (bad placement, missing solution values).
class InputError : public Error
{
public:
    using Error::Error;
};

class NoPathError : public Error
{
public:
    using Error::Error;
};

/// A node's processing, LAN or switching capacity would be exceeded.
class CapacityExceeded : public Error
{
public:
    CapacityExceeded(std::string node_id, std::string resource, double required, double available);

    const std::string& node_id() const noexcept { return node_id_; }
    const std::string& resource() const noexcept { return resource_; }
    double required() const noexcept { return required_; }
    double available() const noexcept { return available_; }

private:
    std::string node_id_;
    std::string resource_;
    double required_;
    double available_;
};

/// Exhaustive search refused because the configuration count is too large.
class SearchSpaceTooLarge : public Error
{
public:
    SearchSpaceTooLarge(double estimate, std::uint64_t limit);

    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

} // namespace cfn

#endif
