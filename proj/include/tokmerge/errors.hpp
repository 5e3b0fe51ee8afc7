// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tokmerge {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed, degenerate, or otherwise unusable input data. The CLI maps
/// this class to exit code 2.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Violated internal invariant or API misuse. The CLI maps this class to
/// exit code 3.
class InvariantError : public Error {
public:
    using Error::Error;
};

// --- data / format errors ---------------------------------------------------

class ZeroNormVector final : public FormatError {
public:
    explicit ZeroNormVector(const std::string& msg = "feature vector has (near-)zero norm")
        : FormatError(msg) {}
};

class BadMagic final : public FormatError {
public:
    explicit BadMagic(const std::string& msg) : FormatError("bad npy file: " + msg) {}
};

class UnsupportedDtype final : public FormatError {
public:
    explicit UnsupportedDtype(const std::string& msg)
        : FormatError("unsupported npy payload: " + msg) {}
};

class WrongRank final : public FormatError {
public:
    explicit WrongRank(const std::string& msg) : FormatError("bad tensor shape: " + msg) {}
};

class NonFinitePayload final : public FormatError {
public:
    explicit NonFinitePayload(const std::string& msg = "payload contains NaN or Inf")
        : FormatError(msg) {}
};

class IoFailure final : public FormatError {
public:
    explicit IoFailure(const std::string& msg) : FormatError("io failure: " + msg) {}
};

class InvalidSpec final : public FormatError {
public:
    explicit InvalidSpec(const std::string& msg) : FormatError("invalid synth spec: " + msg) {}
};

class InvalidTarget final : public FormatError {
public:
    explicit InvalidTarget(const std::string& msg) : FormatError("invalid target: " + msg) {}
};

// --- invariant errors -------------------------------------------------------

class EmptyChildren final : public InvariantError {
public:
    explicit EmptyChildren(const std::string& msg = "pooling over an empty child list")
        : InvariantError(msg) {}
};

class FrameOutOfRange final : public InvariantError {
public:
    explicit FrameOutOfRange(const std::string& msg) : InvariantError(msg) {}
};

class PartitionMismatch final : public InvariantError {
public:
    explicit PartitionMismatch(const std::string& msg) : InvariantError(msg) {}
};

class CycleDetected final : public InvariantError {
public:
    explicit CycleDetected(const std::string& msg = "merge forest contains a cycle")
        : InvariantError(msg) {}
};

class UnknownStrategy final : public InvariantError {
public:
    explicit UnknownStrategy(const std::string& msg) : InvariantError(msg) {}
};

}  // namespace tokmerge
