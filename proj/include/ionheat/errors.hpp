#pragma once

#include <stdexcept>
#include <string>

namespace ionheat {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Two ions closer than the collision guard.
class SingularityError : public Error {
public:
    SingularityError(std::size_t a, std::size_t b, double distance)
        : Error("ions " + std::to_string(a) + " and " + std::to_string(b)
                + " coincide (distance " + std::to_string(distance) + ")"),
          first(a), second(b) {}
    std::size_t first;
    std::size_t second;
};

/// Integration produced a non-finite or runaway component.
class BlowUpError : public Error {
public:
    BlowUpError(long long step, double last_good_time)
        : Error("trajectory blew up at step " + std::to_string(step)
                + " (last good time " + std::to_string(last_good_time) + ")"),
          step(step), last_good_time(last_good_time) {}
    long long step;
    double last_good_time;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Statistics requested over a window that holds no samples.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

} // namespace ionheat
