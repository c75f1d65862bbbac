#include "hetaug/synth.hpp"

#include "hetaug/error.hpp"
#include "hetaug/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

namespace hetaug {

namespace {

struct RawEdge {
    std::uint32_t src;
    std::uint32_t dst;
    EdgeKind kind;
    std::int64_t t;
    double value;
};

struct Deposit {
    std::uint32_t investor;
    std::int64_t t;
    double amount;
};

std::string account_name(char prefix, std::size_t index) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "0x%c%039zx", prefix, index);
    return buf;
}

class Generator {
public:
    explicit Generator(const SynthConfig& cfg)
        : cfg_(cfg), rng_(cfg.seed), n_ca_(cfg.n_ponzi_ca + cfg.n_normal_ca) {}

    SyntheticData run() {
        // Node ids: Ponzi CAs, normal CAs, then EOAs.
        for (std::size_t c = 0; c < n_ca_; ++c) plant_contract(static_cast<std::uint32_t>(c), c < cfg_.n_ponzi_ca);
        add_noise();
        return build();
    }

private:
    std::uint32_t eoa(std::size_t i) const { return static_cast<std::uint32_t>(n_ca_ + i); }

    double amount() { return std::round(rng_.lognormal(10.0, cfg_.amount_sigma)); }

    // Any other contract, regardless of class, so relays do not leak labels.
    std::uint32_t pick_intermediary(std::uint32_t self) {
        if (n_ca_ < 2) return self;
        while (true) {
            const auto c = static_cast<std::uint32_t>(rng_.below(n_ca_));
            if (c != self) return c;
        }
    }

    // relay_t < 0: the intermediary pays right after the call (a payout chain).
    // Otherwise the call and the intermediary's transfer are unrelated events.
    void payout(std::uint32_t ca, std::uint32_t intermediary, std::uint32_t to, std::int64_t t,
                double value, std::int64_t max_delay, std::int64_t relay_t = -1) {
        if (intermediary != ca && rng_.bernoulli(cfg_.p2_fraction)) {
            edges_.push_back({ca, intermediary, EdgeKind::call, t, value});
            edges_.push_back({intermediary, to, EdgeKind::trans, relay_t < 0 ? t + rng_.between(1, max_delay) : relay_t, value});
        } else {
            edges_.push_back({ca, to, EdgeKind::trans, t, value});
        }
    }

    void plant_contract(std::uint32_t ca, bool ponzi) {
        if (cfg_.n_eoa == 0) return;
        const std::int64_t horizon = cfg_.time_horizon;
        const std::int64_t start = rng_.between(0, horizon / 2);
        const std::int64_t length = rng_.between(std::max<std::int64_t>(horizon / 4, 2), std::max<std::int64_t>(horizon / 2, 2));
        const std::int64_t end = std::min(horizon, start + length);
        const std::int64_t max_delay = std::max<std::int64_t>(1, length / 50);
        const std::int64_t max_lag =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(2.0 * cfg_.payout_lag * static_cast<double>(length)));

        const std::size_t n_investors =
            std::min<std::size_t>(cfg_.n_eoa, std::max<std::uint64_t>(2, rng_.poisson(cfg_.investors_per_ca)));
        std::vector<std::uint32_t> investors;
        const auto pool = static_cast<std::size_t>(cfg_.victim_pool * static_cast<double>(cfg_.n_eoa));
        std::size_t from_pool = 0;
        while (investors.size() < n_investors) {
            const bool recruit = ponzi && from_pool < pool && rng_.bernoulli(cfg_.victim_affinity);
            const auto i = rng_.below(recruit ? pool : cfg_.n_eoa);
            const auto e = eoa(i);
            if (std::find(investors.begin(), investors.end(), e) != investors.end()) continue;
            investors.push_back(e);
            from_pool += i < pool;
        }

        std::vector<Deposit> deposits;
        for (auto inv : investors) {
            const auto rounds = 1 + rng_.poisson(std::max(0.0, cfg_.deposits_per_investor - 1.0));
            for (std::uint64_t r = 0; r < rounds; ++r) deposits.push_back({inv, rng_.between(start, end), amount()});
        }
        std::sort(deposits.begin(), deposits.end(),
                  [](const Deposit& a, const Deposit& b) { return std::tie(a.t, a.investor) < std::tie(b.t, b.investor); });
        for (const auto& d : deposits) {
            edges_.push_back({d.investor, ca, EdgeKind::call, d.t, d.amount});
            edges_.push_back({d.investor, ca, EdgeKind::trans, d.t, d.amount});
        }

        const std::uint32_t intermediary = pick_intermediary(ca);
        bool paid_other = false;
        for (std::size_t i = 0; i < deposits.size(); ++i) {
            if (!rng_.bernoulli(cfg_.reward_probability)) continue;
            const double noise = rng_.lognormal(0.0, 0.1);
            if (ponzi) {
                // New money pays an earlier investor, strictly after the deposit.
                if (i == 0) continue;
                const auto& earlier = deposits[rng_.below(i)];
                const std::int64_t t = deposits[i].t + rng_.between(1, max_lag);
                const auto before = edges_.size();
                payout(ca, intermediary, earlier.investor, t,
                       std::round(earlier.amount * cfg_.payback_ratio * noise), max_delay);
                paid_other |= edges_.size() == before + 1 && earlier.investor != deposits[i].investor;
            } else {
                const auto& d = deposits[rng_.below(deposits.size())];
                const std::int64_t t = rng_.between(start, end);
                const double value = std::round(d.amount * cfg_.normal_payback_ratio * noise);
                if (rng_.bernoulli(cfg_.self_call_rate_normal)) {
                    edges_.push_back({ca, ca, EdgeKind::call, t, 0.0});
                    edges_.push_back({ca, d.investor, EdgeKind::trans, t + rng_.between(1, max_delay), value});
                } else {
                    payout(ca, intermediary, d.investor, t, value, max_delay, rng_.between(start, end));
                }
            }
        }

        if (ponzi && !paid_other) {
            // Every scheme pays at least one earlier investor directly.
            const auto second = std::find_if(deposits.begin(), deposits.end(), [&](const Deposit& d) {
                return d.investor != deposits.front().investor;
            });
            const auto& first = deposits.front();
            if (second != deposits.end())
                edges_.push_back({ca, first.investor, EdgeKind::trans, second->t + rng_.between(1, max_delay),
                              std::round(first.amount * cfg_.payback_ratio)});
        }
    }

    void add_noise() {
        const auto n_noise = static_cast<std::size_t>(cfg_.noise_fraction * static_cast<double>(edges_.size()));
        if (cfg_.n_eoa == 0) return;
        for (std::size_t i = 0; i < n_noise; ++i) {
            const std::int64_t t = rng_.between(0, cfg_.time_horizon);
            const auto e1 = eoa(rng_.below(cfg_.n_eoa));
            const double value = amount();
            const auto choice = n_ca_ == 0 ? 0 : rng_.below(4);
            const auto ca = n_ca_ == 0 ? 0u : static_cast<std::uint32_t>(rng_.below(n_ca_));
            switch (choice) {
            case 0: {
                const auto e2 = eoa(rng_.below(cfg_.n_eoa));
                if (e2 != e1) edges_.push_back({e1, e2, EdgeKind::trans, t, value});
                break;
            }
            case 1:
                edges_.push_back({e1, ca, EdgeKind::call, t, value});
                edges_.push_back({e1, ca, EdgeKind::trans, t, value});
                break;
            case 2:
                edges_.push_back({ca, e1, EdgeKind::trans, t, value});
                break;
            default: {
                const auto other = static_cast<std::uint32_t>(rng_.below(n_ca_));
                if (other != ca) edges_.push_back({ca, other, EdgeKind::call, t, 0.0});
                break;
            }
            }
        }
    }

    SyntheticData build() {
        std::stable_sort(edges_.begin(), edges_.end(), [](const RawEdge& a, const RawEdge& b) {
            return std::tie(a.t, a.src, a.dst, a.kind) < std::tie(b.t, b.src, b.dst, b.kind);
        });

        GraphBuilder builder;
        std::vector<std::string> names;
        names.reserve(n_ca_ + cfg_.n_eoa);
        for (std::size_t c = 0; c < n_ca_; ++c) {
            names.push_back(account_name('c', c));
            builder.add_node(names.back(), NodeType::ca);
        }
        for (std::size_t e = 0; e < cfg_.n_eoa; ++e) {
            names.push_back(account_name('e', e));
            builder.add_node(names.back(), NodeType::eoa);
        }
        for (const auto& e : edges_) builder.add_edge(names[e.src], names[e.dst], e.kind, e.t, e.value);

        SyntheticData out;
        out.graph = std::move(builder).build(TypeSource::explicit_types);
        for (std::size_t c = 0; c < cfg_.n_ponzi_ca; ++c) out.labels.ponzi_accounts.push_back(static_cast<NodeId>(c));
        out.labels.source = "synthetic seed=" + std::to_string(cfg_.seed);
        return out;
    }

    const SynthConfig& cfg_;
    Rng rng_;
    std::size_t n_ca_;
    std::vector<RawEdge> edges_;
};

} // namespace

void SynthConfig::validate() const {
    const auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
    };
    prob(reward_probability, "reward_probability");
    prob(p2_fraction, "p2_fraction");
    prob(self_call_rate_normal, "self_call_rate_normal");
    prob(victim_pool, "victim_pool");
    prob(victim_affinity, "victim_affinity");
    if (!(investors_per_ca >= 0.0)) throw ConfigError("investors_per_ca must be >= 0");
    if (!(deposits_per_investor >= 1.0)) throw ConfigError("deposits_per_investor must be >= 1");
    if (!(payback_ratio >= 0.0) || !(normal_payback_ratio >= 0.0)) throw ConfigError("payback ratios must be >= 0");
    if (!(amount_sigma >= 0.0)) throw ConfigError("amount_sigma must be >= 0");
    if (!(payout_lag >= 0.0)) throw ConfigError("payout_lag must be >= 0");
    if (!(noise_fraction >= 0.0)) throw ConfigError("noise_fraction must be >= 0");
    if (time_horizon < 4) throw ConfigError("time_horizon must be >= 4");
    if ((n_ponzi_ca + n_normal_ca) > 0 && n_eoa == 0 && investors_per_ca > 0)
        throw ConfigError("contracts need at least one EOA");
}

SyntheticData generate(const SynthConfig& cfg) {
    cfg.validate();
    return Generator(cfg).run();
}

void write_synthetic(const std::filesystem::path& dir, const SyntheticData& data) {
    std::filesystem::create_directories(dir);
    std::ofstream edges(dir / "edges.csv", std::ios::binary | std::ios::trunc);
    std::ofstream types(dir / "types.csv", std::ios::binary | std::ios::trunc);
    std::ofstream labels(dir / "labels.txt", std::ios::binary | std::ios::trunc);
    if (!edges || !types || !labels) throw ConfigError("cannot write to " + dir.string());
    write_edges_csv(edges, data.graph);
    write_types_csv(types, data.graph);
    write_labels(labels, data.labels, data.graph);
}

} // namespace hetaug
