#pragma once

#include <stdexcept>
#include <string>

namespace aqds {

/// Base class for all library-specific runtime failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Channel so lossy (or parameters so degenerate) that no successful pairing
/// events are expected; rate computations cannot proceed.
class DegenerateChannelError : public Error {
public:
    explicit DegenerateChannelError(const std::string& what) : Error(what) {}
};

/// The distribution stage yields no usable key bits (empty Z-basis sample).
class NoKeyError : public Error {
public:
    explicit NoKeyError(const std::string& what) : Error(what) {}
};

/// Malformed external input: hex strings, bundle/share files, config files.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// A request would materialize more memory/work than the configured cap
/// (e.g. an explicit hash matrix too large, or a Monte Carlo run too long).
class ResourceLimitError : public Error {
public:
    explicit ResourceLimitError(const std::string& what) : Error(what) {}
};

}  // namespace aqds
