#pragma once

#include <stdexcept>
#include <string>

namespace doagc {

// Shape mismatch between operands (matmul inner dims, elementwise binary ops, ...).
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Value outside an operation's domain (negative entries, non-one-hot rows, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated API contract (non-scalar loss node, k > N, bad config, ...).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dataset directory problems; message names the offending file (and line when known).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested synthetic graph cannot be built from the available node-pair pools.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced a non-finite loss; message names the epoch.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace doagc
