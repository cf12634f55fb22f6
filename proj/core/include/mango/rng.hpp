// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace mango
{

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64. The output
/// sequence is fully specified, so seeded traces are identical on every platform.
class Xoshiro256
{
  public:
    using State = std::array<std::uint64_t, 4>;

    explicit Xoshiro256(std::uint64_t seed = 0);

    static Xoshiro256 from_state(const State& state);

    std::uint64_t next();

    /// Uniform double in the open interval (0, 1), 53 bits of precision.
    double uniform_open();

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the Marsaglia polar method (no cached spare).
    double normal();

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
    double gamma(double shape);

    /// Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
    double beta(double a, double b);

    [[nodiscard]] const State& state() const noexcept { return _s; }

    bool operator==(const Xoshiro256&) const = default;

  private:
    State _s {};
};

/// SplitMix64 step, exposed for deriving independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t& state);

} // namespace mango
