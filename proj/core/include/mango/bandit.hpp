// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/ranking.hpp>
#include <mango/rng.hpp>
#include <mango/search_augment.hpp>
#include <mango/url.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mango
{

struct BanditConfig
{
    double kappa = 3.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

enum class ArmStatus
{
    Active,
    Exhausted,
};

std::string_view to_string(ArmStatus status);

/// Bernoulli reward fed into the Beta posterior.
enum class Reward
{
    Zero = 0,
    One = 1,
};

struct CandidateArm
{
    CanonicalUrl url;
    double alpha = 1.0;
    double beta = 1.0;
    double prior_alpha = 1.0;
    double prior_beta = 1.0;
    ArmStatus status = ArmStatus::Active;
    std::size_t pulls = 0;
    double rho = 0.0;
    double lambda = 0.0;
    Provenance provenance = Provenance::Crawl;
    /// Reward counts; alpha and beta are always prior + count, so repeated
    /// updates never accumulate rounding error.
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;

    bool operator==(const CandidateArm&) const = default;
};

struct SelectionDraw
{
    CanonicalUrl url;
    /// theta draws for every Active arm, in arm insertion order.
    std::vector<std::pair<CanonicalUrl, double>> theta_samples;
};

/// Finite-lifetime Beta-Bernoulli Thompson sampler. Arms keep insertion order;
/// an arm leaves the active set for good once exhausted.
class BanditState
{
  public:
    BanditState(std::vector<CandidateArm> arms, std::uint64_t seed);

    /// Samples theta ~ Beta(alpha, beta) for each Active arm and returns the argmax
    /// (first arm wins exact ties). Throws AllArmsExhausted.
    SelectionDraw select_arm();

    /// alpha = alpha0 + sum r, beta = beta0 + sum (1 - r). Throws UnknownArm / ArmAlreadyExhausted.
    void update(const CanonicalUrl& url, Reward reward);

    /// Idempotent. Throws UnknownArm.
    void exhaust_arm(const CanonicalUrl& url);

    [[nodiscard]] const std::vector<CandidateArm>& arms() const noexcept { return _arms; }
    [[nodiscard]] const CandidateArm& arm(const CanonicalUrl& url) const;
    [[nodiscard]] bool has_active_arm() const;
    [[nodiscard]] std::size_t active_count() const;
    [[nodiscard]] std::uint64_t step() const noexcept { return _step; }
    [[nodiscard]] const Xoshiro256& rng() const noexcept { return _rng; }

    bool operator==(const BanditState&) const = default;

  private:
    CandidateArm& mutableArm(const CanonicalUrl& url);

    std::vector<CandidateArm> _arms;
    std::unordered_map<CanonicalUrl, std::size_t> _index;
    Xoshiro256 _rng;
    std::uint64_t _step = 0;
};

/// alpha = 1 + kappa * rho, beta = 1 + kappa * (1 - rho) for every candidate.
/// Throws EmptyCandidates.
BanditState init_arms(const CandidateSet& candidates, const BanditConfig& config);

/// {step, arms: [{url, alpha, beta, status, pulls, rho, provenance}]}
nlohmann::json snapshot_json(const BanditState& state);

} // namespace mango
