#pragma once

#include <stdexcept>
#include <string>

namespace maglat {

// Spec/structure violations: bad Hermitian pairing, range violations,
// unsupported supports, malformed config fields.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sector (or the total Fock space) exceeds the configured dense cap.
// Message names the offending sector and its dimension.
struct DimensionCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operator/engine applied across incompatible mode indices or to a spec the
// engine refuses (e.g. interactions in the free-fermion path).
struct EngineMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace maglat
