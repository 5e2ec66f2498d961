#pragma once

#include <cstdint>
#include <string_view>

namespace qps {

// Deterministic random number generation for reproducible experiments.
//
// All randomness in the project flows from a single 64-bit master seed.
// Substreams are derived by hashing (seed, label) or (seed, index), so
// Monte-Carlo trials can run in parallel and still aggregate to results
// that are bit-identical regardless of thread count or completion order.
//
// The generator is xoshiro256** seeded through SplitMix64; normal deviates
// use the Box-Muller transform on 53-bit uniforms. The algorithms are fixed
// here (not delegated to <random>) so that sequences are stable across
// platforms and standard-library versions.

std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a 64-bit hash of a label string, used for named substreams.
std::uint64_t hash_label(std::string_view label);

// Derives a substream seed from (seed, index): one SplitMix64 step over
// seed + (index+1) * golden-ratio increment.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Derives a substream seed from (seed, label): derive_seed with the label hash.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    // Named substream: Rng(derive_seed(seed, label)).
    static Rng from_stream(std::uint64_t master_seed, std::string_view label);

    // Indexed substream, e.g. one per Monte-Carlo trial.
    Rng substream(std::uint64_t index) const;

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53-bit resolution.
    double uniform();

    // Uniform integer in [0, bound), bound >= 1, rejection-sampled (unbiased).
    std::uint64_t uniform_int(std::uint64_t bound);

    // Normal deviate via Box-Muller; the spare value is cached, so draws
    // come in deterministic pairs.
    double normal(double mean, double stddev);

  private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace qps
