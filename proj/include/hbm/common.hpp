#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hbm {

// Base for all library errors. The CLI maps InputError -> exit 2 and
// NumericError -> exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

// Parse failure in a body/grid descriptor; carries the byte offset of the
// offending character within the input string.
struct ParseError : InputError {
    ParseError(const std::string& msg, std::size_t offset)
        : InputError(msg + " (at byte " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::size_t byte_offset;
};

// A numerical guard tripped (positivity, convexity, conditioning, solver
// convergence). The message names the guard and, where applicable, the node.
struct NumericError : Error {
    using Error::Error;
};

// Counter-based generator: a keyed SplitMix64 finalizer. Every draw is a pure
// function of (seed, counter), so sweeps reproduce bit-identically across
// platforms and thread schedules.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return value(counter_++); }

    // uniform in [0, 1)
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t value(std::uint64_t counter) const {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (counter + 1) +
                          0xbf58476d1ce4e5b9ULL * (stream_ + 1);
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

// Worker cap from HBM_THREADS (default: hardware parallelism).
int worker_count();

}  // namespace hbm
