#pragma once

#include <stdexcept>

namespace antforest {

// An estimate whose inputs left nothing to estimate from (no OOB rows, fewer
// than two non-constant vectors, ...).
struct DegenerateEstimateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace antforest
