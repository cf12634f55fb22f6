// SPDX-License-Identifier: Apache-2.0
#include <mango/bandit.hpp>
#include <mango/errors.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>

namespace mango
{

void BanditConfig::validate() const
{
    if (!(kappa >= 0.0))
        throw std::invalid_argument("kappa must be >= 0");
}

std::string_view to_string(ArmStatus status)
{
    switch (status)
    {
        case ArmStatus::Active: return "active";
        case ArmStatus::Exhausted: return "exhausted";
    }
    return "active";
}

BanditState::BanditState(std::vector<CandidateArm> arms, std::uint64_t seed): _arms(std::move(arms)), _rng(seed)
{
    if (_arms.empty())
        throw EmptyCandidates("bandit needs at least one arm");
    for (std::size_t i = 0; i < _arms.size(); ++i)
        if (!_index.emplace(_arms[i].url, i).second)
            throw std::invalid_argument("duplicate arm: " + _arms[i].url.str());
}

SelectionDraw BanditState::select_arm()
{
    SelectionDraw draw;
    double best = -1.0;
    for (auto const& arm: _arms)
    {
        if (arm.status != ArmStatus::Active)
            continue;
        auto const theta = _rng.beta(arm.alpha, arm.beta);
        draw.theta_samples.emplace_back(arm.url, theta);
        if (theta > best)
        {
            best = theta;
            draw.url = arm.url;
        }
    }
    if (draw.theta_samples.empty())
        throw AllArmsExhausted("no active arms left");
    ++_step;
    return draw;
}

void BanditState::update(const CanonicalUrl& url, Reward reward)
{
    auto& arm = mutableArm(url);
    if (arm.status == ArmStatus::Exhausted)
        throw ArmAlreadyExhausted("arm already exhausted: " + url.str());
    if (reward == Reward::One)
        ++arm.successes;
    else
        ++arm.failures;
    arm.alpha = arm.prior_alpha + static_cast<double>(arm.successes);
    arm.beta = arm.prior_beta + static_cast<double>(arm.failures);
    ++arm.pulls;
}

void BanditState::exhaust_arm(const CanonicalUrl& url)
{
    mutableArm(url).status = ArmStatus::Exhausted;
}

const CandidateArm& BanditState::arm(const CanonicalUrl& url) const
{
    auto const it = _index.find(url);
    if (it == _index.end())
        throw UnknownArm("unknown arm: " + url.str());
    return _arms[it->second];
}

CandidateArm& BanditState::mutableArm(const CanonicalUrl& url)
{
    return const_cast<CandidateArm&>(std::as_const(*this).arm(url));
}

bool BanditState::has_active_arm() const
{
    return active_count() > 0;
}

std::size_t BanditState::active_count() const
{
    return static_cast<std::size_t>(std::ranges::count(_arms, ArmStatus::Active, &CandidateArm::status));
}

BanditState init_arms(const CandidateSet& candidates, const BanditConfig& config)
{
    config.validate();
    if (candidates.arms.empty())
        throw EmptyCandidates("candidate set is empty");

    std::vector<CandidateArm> arms;
    arms.reserve(candidates.arms.size());
    for (auto const& scored: candidates.arms)
    {
        CandidateArm arm;
        arm.url = scored.url;
        arm.rho = scored.rho;
        arm.lambda = scored.lambda;
        arm.provenance = scored.provenance;
        arm.alpha = arm.prior_alpha = 1.0 + config.kappa * scored.rho;
        arm.beta = arm.prior_beta = 1.0 + config.kappa * (1.0 - scored.rho);
        arms.push_back(std::move(arm));
    }
    return BanditState(std::move(arms), config.rng_seed);
}

nlohmann::json snapshot_json(const BanditState& state)
{
    auto arms = nlohmann::json::array();
    for (auto const& arm: state.arms())
        arms.push_back({
            { "url", arm.url.str() },
            { "alpha", arm.alpha },
            { "beta", arm.beta },
            { "status", std::string(to_string(arm.status)) },
            { "pulls", arm.pulls },
            { "rho", arm.rho },
            { "provenance", std::string(to_string(arm.provenance)) },
        });
    return { { "step", state.step() }, { "arms", std::move(arms) } };
}

} // namespace mango
