#include "cdrkit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "cdrkit/rng.hpp"
#include "cdrkit/timeutil.hpp"

namespace cdrkit {

namespace {

std::string padded_id(const char* prefix, std::uint64_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*llu", prefix, width,
                  static_cast<unsigned long long>(value));
    return buf;
}

int digits_for(std::uint64_t n) {
    int d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_users < 1) throw std::invalid_argument("synth: n_users must be positive");
    if (n_towers < 1) throw std::invalid_argument("synth: n_towers must be positive");
    if (n_months < 1 || n_months > 64) {
        throw std::invalid_argument("synth: n_months must be in [1, 64]");
    }
    if (planted_blocks.empty()) throw std::invalid_argument("synth: planted_blocks is empty");
    std::uint64_t total = 0;
    for (const auto b : planted_blocks) {
        if (b < 1) throw std::invalid_argument("synth: block sizes must be positive");
        total += b;
    }
    if (total != n_users) {
        throw std::invalid_argument("synth: planted_blocks must sum to n_users");
    }
    if (income_levels.size() != planted_blocks.size()) {
        throw std::invalid_argument("synth: need one income level per block");
    }
    for (const auto lvl : income_levels) {
        if (!(lvl > 0.0)) throw std::invalid_argument("synth: income levels must be positive");
    }
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0) {
        throw std::invalid_argument("synth: contact probabilities must be in [0,1]");
    }
    if (!(p_in > p_out)) throw std::invalid_argument("synth: p_in must exceed p_out");
    if (homophily_strength < 0.0 || homophily_strength > 1.0) {
        throw std::invalid_argument("synth: homophily_strength must be in [0,1]");
    }
    if (purchase_cv < 0.0) throw std::invalid_argument("synth: purchase_cv must be >= 0");
    if (n_service_numbers > 0 && service_fanout < 1) {
        throw std::invalid_argument("synth: service_fanout must be positive");
    }
}

SynthDataset generate(const SynthConfig& config) {
    config.validate();
    rng::Engine eng(config.seed);

    const auto window =
        ObservationWindow::from_months(month_start(config.start_month_index), config.n_months);
    SynthDataset data{{}, {}, {}, {}, window, {}};

    // Towers on a jittered grid over a country-sized box.
    const auto cols = static_cast<std::uint64_t>(
        std::ceil(std::sqrt(static_cast<double>(config.n_towers))));
    const auto rows = (config.n_towers + cols - 1) / cols;
    const double dlat = 5.0 / static_cast<double>(rows);
    const double dlon = 5.0 / static_cast<double>(cols);
    const int tower_width = std::max(4, digits_for(config.n_towers));
    data.towers.reserve(config.n_towers);
    for (std::uint64_t t = 0; t < config.n_towers; ++t) {
        const auto row = t / cols;
        const auto col = t % cols;
        TowerInfo info;
        info.tower_id = padded_id("T", t + 1, tower_width);
        info.lat = 5.0 + (static_cast<double>(row) + 0.5) * dlat +
                   (rng::uniform01(eng) - 0.5) * 0.5 * dlat;
        info.lon = -8.0 + (static_cast<double>(col) + 0.5) * dlon +
                   (rng::uniform01(eng) - 0.5) * 0.5 * dlon;
        data.towers.push_back(std::move(info));
    }

    // Users: sequential block fill, planted income level, uniform home tower.
    const auto n_levels = config.income_levels.size();
    const int user_width = std::max(6, digits_for(config.n_users));
    std::vector<std::uint32_t> block_of(config.n_users);
    std::vector<double> income_of(config.n_users);
    std::vector<std::uint32_t> tower_of(config.n_users);
    std::vector<std::uint64_t> block_start(config.planted_blocks.size());
    data.truth.users.reserve(config.n_users);
    {
        std::uint64_t u = 0;
        for (std::size_t b = 0; b < config.planted_blocks.size(); ++b) {
            block_start[b] = u;
            for (std::uint64_t k = 0; k < config.planted_blocks[b]; ++k, ++u) {
                block_of[u] = static_cast<std::uint32_t>(b);
                const bool follows_block = rng::uniform01(eng) < config.homophily_strength;
                const std::size_t level_idx =
                    follows_block ? b : static_cast<std::size_t>(rng::bounded(eng, n_levels));
                income_of[u] = config.income_levels[level_idx];
                tower_of[u] = static_cast<std::uint32_t>(rng::bounded(eng, config.n_towers));
                PlantedUser pu;
                pu.user_id = padded_id("U", u + 1, user_width);
                pu.block_id = block_of[u];
                pu.income_level = income_of[u];
                pu.home_tower_id = data.towers[tower_of[u]].tower_id;
                data.truth.users.push_back(std::move(pu));
            }
        }
    }

    const auto month_time = [&](int m) {
        const auto begin = month_start(config.start_month_index + m);
        const auto length = month_start(config.start_month_index + m + 1) - begin;
        return begin + static_cast<UtcSeconds>(rng::bounded(eng, static_cast<std::uint64_t>(length)));
    };

    // Top-ups: monthly purchase count scales inversely with income so every
    // user spends roughly the same budget; amounts are log-normal with the
    // exact mean equal to the income level.
    const double budget =
        3.0 * *std::max_element(config.income_levels.begin(), config.income_levels.end());
    const double sigma_ln = std::sqrt(std::log1p(config.purchase_cv * config.purchase_cv));
    for (std::uint64_t u = 0; u < config.n_users; ++u) {
        const double mu_ln = std::log(income_of[u]) - 0.5 * sigma_ln * sigma_ln;
        const double lambda = budget / income_of[u];
        for (int m = 0; m < config.n_months; ++m) {
            const auto count = std::max<std::uint64_t>(1, rng::poisson(eng, lambda));
            for (std::uint64_t k = 0; k < count; ++k) {
                TopUpRecord rec;
                rec.timestamp = month_time(m);
                rec.user_id = data.truth.users[u].user_id;
                rec.amount_minor = std::max<std::int64_t>(
                    1, std::llround(std::exp(rng::normal(eng, mu_ln, sigma_ln))));
                data.topups.push_back(std::move(rec));
            }
        }
    }

    const auto emit_event = [&](std::uint64_t caller, std::uint64_t callee, int m) {
        CdrRecord rec;
        rec.timestamp = month_time(m);
        rec.caller_id = data.truth.users[caller].user_id;
        rec.callee_id = data.truth.users[callee].user_id;
        rec.tower_id = data.towers[tower_of[caller]].tower_id;
        if (rng::uniform01(eng) < 0.7) {
            rec.kind = CommKind::Call;
            rec.duration_s = 5 + static_cast<std::int64_t>(rng::bounded(eng, 1795));
        } else {
            rec.kind = CommKind::Sms;
            rec.duration_s = 0;
        }
        data.cdr.push_back(std::move(rec));
    };

    // Anchor events: every user initiates one event per month, keeping the
    // home tower recoverable and every user present in every month.
    if (config.n_users > 1) {
        for (std::uint64_t u = 0; u < config.n_users; ++u) {
            const auto b = block_of[u];
            const auto size = config.planted_blocks[b];
            const auto self_pos = u - block_start[b];
            for (int m = 0; m < config.n_months; ++m) {
                std::uint64_t callee;
                if (size > 1) {
                    auto r = rng::bounded(eng, size - 1);
                    if (r >= self_pos) ++r;
                    callee = block_start[b] + r;
                } else {
                    auto r = rng::bounded(eng, config.n_users - 1);
                    if (r >= u) ++r;
                    callee = r;
                }
                emit_event(u, callee, m);
            }
        }
    } else {
        data.warnings.push_back("single user: no communication events generated");
    }

    // Pair events. Intra-block contacted pairs get events in every month;
    // inter-block contacted pairs cover all months only half the time, the
    // rest a strict subset, so the persistence rule prunes them.
    std::uint64_t intra_contacted = 0;
    const std::uint64_t full_mask = config.n_months == 64
                                        ? ~std::uint64_t{0}
                                        : (std::uint64_t{1} << config.n_months) - 1;
    for (std::uint64_t i = 0; i + 1 < config.n_users; ++i) {
        for (std::uint64_t j = i + 1; j < config.n_users; ++j) {
            const bool same_block = block_of[i] == block_of[j];
            const double p = same_block ? config.p_in : config.p_out;
            if (rng::uniform01(eng) >= p) continue;
            if (same_block) {
                ++intra_contacted;
                for (int m = 0; m < config.n_months; ++m) {
                    const auto n_events = 1 + rng::poisson(eng, 2.0);
                    for (std::uint64_t e = 0; e < n_events; ++e) {
                        const bool forward = rng::bounded(eng, 2) == 1;
                        emit_event(forward ? i : j, forward ? j : i, m);
                    }
                }
            } else {
                std::uint64_t mask;
                if (config.n_months == 1 || rng::bounded(eng, 2) == 1) {
                    mask = full_mask;
                } else {
                    mask = 1 + rng::bounded(eng, full_mask - 1);
                }
                for (int m = 0; m < config.n_months; ++m) {
                    if (!(mask & (std::uint64_t{1} << m))) continue;
                    const bool forward = rng::bounded(eng, 2) == 1;
                    emit_event(forward ? i : j, forward ? j : i, m);
                }
            }
        }
    }
    if (intra_contacted == 0 && config.n_users > 1) {
        data.warnings.push_back(
            "no intra-block pair was contacted; the persistent graph will be sparse or empty");
    }

    // Service numbers broadcast one event to each of many distinct users and
    // receive none, so both filter rules see them.
    if (config.n_service_numbers > 0) {
        const auto fanout = std::min<std::uint64_t>(config.service_fanout, config.n_users);
        const int svc_width = std::max(3, digits_for(config.n_service_numbers));
        std::vector<std::uint64_t> targets(config.n_users);
        std::iota(targets.begin(), targets.end(), 0);
        for (std::uint64_t s = 0; s < config.n_service_numbers; ++s) {
            const auto svc_id = padded_id("S", s + 1, svc_width);
            const auto svc_tower = rng::bounded(eng, config.n_towers);
            for (std::uint64_t k = 0; k < fanout; ++k) {
                const auto j = k + rng::bounded(eng, config.n_users - k);
                std::swap(targets[k], targets[j]);
            }
            for (std::uint64_t k = 0; k < fanout; ++k) {
                CdrRecord rec;
                const int m = static_cast<int>(rng::bounded(eng, config.n_months));
                rec.timestamp = month_time(m);
                rec.caller_id = svc_id;
                rec.callee_id = data.truth.users[targets[k]].user_id;
                rec.tower_id = data.towers[svc_tower].tower_id;
                if (rng::uniform01(eng) < 0.7) {
                    rec.kind = CommKind::Call;
                    rec.duration_s = 5 + static_cast<std::int64_t>(rng::bounded(eng, 1795));
                } else {
                    rec.kind = CommKind::Sms;
                    rec.duration_s = 0;
                }
                data.cdr.push_back(std::move(rec));
            }
            data.truth.service_ids.push_back(svc_id);
        }
    }

    return data;
}

}  // namespace cdrkit
