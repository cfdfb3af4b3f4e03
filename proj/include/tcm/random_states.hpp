#pragma once

// Random pure states and the I-residual-tangle positivity sweep.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tcm/tensor.hpp"

namespace tcm {

/// SplitMix64 finalizer over (seed, stream); independent per-sample streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class SamplingMeasure {
    haar,            ///< normalized complex Gaussian vector on the full space
    product_factors  ///< independent Haar states per factor (sensitivity check)
};

PureState haar_pure(const SystemShape& shape, std::uint64_t seed,
                    SamplingMeasure measure = SamplingMeasure::haar);

inline constexpr double kNegativeThreshold = -1e-9;

struct SweepResult {
    std::uint64_t samples = 0;
    double min_value = 0.0;
    std::uint64_t argmin_index = 0;
    std::optional<PureState> argmin_state;
    std::uint64_t negative_count = 0;
    double sum = 0.0;                       ///< for the mean value
    std::vector<PureState> counterexamples;  ///< every sample below kNegativeThreshold
};

struct SweepOptions {
    double rank_tol = 1e-10;
    SamplingMeasure measure = SamplingMeasure::haar;
    bool parallel = true;
};

/// Sample i uses the stream derive_seed(seed, i), so the result does not
/// depend on how samples are sharded.
SweepResult positivity_sweep(const SystemShape& shape, std::uint64_t samples, std::uint64_t seed,
                             const SweepOptions& opts = {});

/// Serial reference; identical output to the parallel sweep.
SweepResult positivity_sweep_serial(const SystemShape& shape, std::uint64_t samples, std::uint64_t seed,
                                    const SweepOptions& opts = {});

/// Dump format: a `dims d0 d1 ...` header line, then one state per line as
/// space-separated (re,im) pairs with 17 significant digits.
void write_state_dump(std::ostream& out, const SystemShape& shape, const std::vector<PureState>& states);
std::vector<PureState> read_state_dump(std::istream& in);

}  // namespace tcm
