#pragma once

#include <stdexcept>
#include <string>

namespace netinf {

// Base class for all simulator errors.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Contract violation in the event queue (e.g. scheduling in the past).
class SchedulingError : public SimError {
public:
    using SimError::SimError;
};

// Cell/VMP geometry constraint violation.
class GeometryError : public SimError {
public:
    using SimError::SimError;
};

// Scenario file parse or validation failure.
class ScenarioError : public SimError {
public:
    using SimError::SimError;
};

// Malformed locator or tunneled packet.
class CodecError : public SimError {
public:
    using SimError::SimError;
};

} // namespace netinf
