#pragma once

#include <stdexcept>
#include <string>

namespace minfact {

// Budget or enumeration-cap overrun. The CLI maps this to exit code 3.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// A query asked for labels that have not been assigned yet; the caller
// should extend the labelling (raise K) and retry.
class ordering_error : public std::logic_error {
public:
    explicit ordering_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace minfact
