#pragma once

#include <stdexcept>
#include <string>

namespace anm {

/// A graph or class that cannot be realized (e.g. a PDAG with no consistent
/// DAG extension).
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request refused because its cost bound is exceeded (exhaustive
/// enumeration beyond the configured node cap).
class RefusalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace anm
