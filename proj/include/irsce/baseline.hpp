#pragma once

#include "irsce/pilots.hpp"

namespace irsce {

// Output of the conventional per-user scheme: K blocks of N+1 slots, each
// inverted with the same DFT machinery as the off-line phase.
struct BenchmarkEstimate {
  std::vector<CVec> h_bu_hat;   // length M each
  std::vector<CMat> H_bsu_hat;  // M x N each
};

BenchmarkEstimate run_benchmark(const ChannelRealization& channels, double power_mw,
                                const NoiseModel* noise, Rng* rng);

}  // namespace irsce
