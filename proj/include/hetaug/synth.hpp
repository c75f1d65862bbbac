#pragma once

#include "hetaug/graph_store.hpp"

#include <cstdint>
#include <filesystem>

namespace hetaug {

// Synthetic labeled interaction graphs with planted behavior.
//
// Every contract takes deposits: an investor calls it and transfers value at
// the same timestamp. Ponzi contracts pay a share of each new deposit to an
// investor who deposited earlier, shortly afterwards. Normal contracts pay
// their users at times drawn independently of the deposits, and some of
// their payouts go through a self-call. A payout is routed through an
// intermediary contract (contract calls contract, which transfers) with
// probability p2_fraction. For a Ponzi contract the intermediary pays right
// after the call; for a normal one the call and the intermediary's transfer
// are unrelated in time. Ponzi schemes draw most investors from a shared
// victim pool. Random noise edges connect all node classes.
struct SynthConfig {
    std::size_t n_ponzi_ca = 100;
    std::size_t n_normal_ca = 100;
    std::size_t n_eoa = 5000;
    double investors_per_ca = 12.0;
    double deposits_per_investor = 2.0;
    double reward_probability = 0.7;
    double payback_ratio = 0.85;          // Ponzi payout per deposit
    double normal_payback_ratio = 1.0;    // normal payout per deposit
    double amount_sigma = 1.0;            // log-normal spread of amounts
    double p2_fraction = 0.3;
    double self_call_rate_normal = 0.2;
    double payout_lag = 0.5;              // Ponzi payout delay, fraction of active window
    double victim_pool = 0.1;             // share of EOAs that Ponzi schemes recruit from
    double victim_affinity = 0.7;         // chance a Ponzi investor comes from that pool
    double noise_fraction = 0.3;          // noise edges per planted edge
    std::int64_t time_horizon = 10'000'000;
    std::uint64_t seed = 7;

    // Throws ConfigError.
    void validate() const;
};

struct SyntheticData {
    HeterogeneousGraph graph;
    LabelSet labels;
};

SyntheticData generate(const SynthConfig& cfg);

// edges.csv, types.csv and labels.txt in the standard formats.
void write_synthetic(const std::filesystem::path& dir, const SyntheticData& data);

} // namespace hetaug
