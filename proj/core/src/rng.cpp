// SPDX-License-Identifier: Apache-2.0
#include <mango/rng.hpp>

#include <cmath>
#include <stdexcept>

namespace mango
{

namespace
{
    constexpr std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }
} // namespace

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed)
{
    for (auto& word: _s)
        word = splitmix64(seed);
}

Xoshiro256 Xoshiro256::from_state(const State& state)
{
    Xoshiro256 rng;
    rng._s = state;
    return rng;
}

std::uint64_t Xoshiro256::next()
{
    auto const result = rotl(_s[1] * 5, 7) * 9;
    auto const t = _s[1] << 17;
    _s[2] ^= _s[0];
    _s[3] ^= _s[1];
    _s[1] ^= _s[2];
    _s[0] ^= _s[3];
    _s[2] ^= t;
    _s[3] = rotl(_s[3], 45);
    return result;
}

double Xoshiro256::uniform_open()
{
    // (k + 0.5) / 2^53 for k in [0, 2^53): never 0, never 1.
    auto const k = next() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::uint64_t Xoshiro256::below(std::uint64_t bound)
{
    if (bound == 0)
        throw std::invalid_argument("below(0)");
    // Lemire-style rejection keeps the result unbiased.
    auto const threshold = (0 - bound) % bound;
    for (;;)
    {
        auto const r = next();
        if (r >= threshold)
            return r % bound;
    }
}

double Xoshiro256::normal()
{
    for (;;)
    {
        auto const u = 2.0 * uniform_open() - 1.0;
        auto const v = 2.0 * uniform_open() - 1.0;
        auto const s = u * u + v * v;
        if (s > 0.0 && s < 1.0)
            return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double Xoshiro256::gamma(double shape)
{
    if (!(shape > 0.0))
        throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0)
        return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);

    auto const d = shape - 1.0 / 3.0;
    auto const c = 1.0 / std::sqrt(9.0 * d);
    for (;;)
    {
        double x = 0.0;
        double v = 0.0;
        do
        {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        auto const u = uniform_open();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x))
            return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

double Xoshiro256::beta(double a, double b)
{
    auto const x = gamma(a);
    auto const y = gamma(b);
    return x / (x + y);
}

} // namespace mango
