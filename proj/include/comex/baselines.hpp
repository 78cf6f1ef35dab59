#pragma once

#include <cstdint>

#include "comex/oracle.hpp"
#include "comex/run_trace.hpp"

namespace comex {

// Independent uniform queries from the constraint set.
RunTrace random_search(const Oracle& oracle, const StopRule& stop, RunStreams& streams, std::uint64_t seed = 0);

// Simulated annealing run directly on the oracle: every proposal costs one
// evaluation and the schedule exp(-omega t / d) advances with the evaluation
// counter. Uses the same neighborhoods as the surrogate acquisition.
RunTrace simulated_annealing_direct(const Oracle& oracle, const StopRule& stop, double omega, RunStreams& streams,
                                    std::uint64_t seed = 0);

}  // namespace comex
