#include "mesoacc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "mesoacc/text.hpp"

namespace mesoacc {

std::vector<std::string> ChannelParams::validate() const {
    std::vector<std::string> errs;
    if (!(radio_range > 0.0)) errs.push_back("radio_range_m must be positive");
    if (!(hop_delay > 0.0)) errs.push_back("hop_delay_s must be positive");
    if (!(max_end_to_end > 0.0)) errs.push_back("max_end_to_end_s must be positive");
    if (!(hop_delay < max_end_to_end)) errs.push_back("hop_delay_s must be below max_end_to_end_s");
    if (!(broadcast_period > 0.0)) errs.push_back("broadcast_period_s must be positive");
    if (relay_compute < 0.0) errs.push_back("relay_compute_s must be nonnegative");
    if (jitter < 0.0) errs.push_back("jitter_s must be nonnegative");
    return errs;
}

std::optional<int> hop_count(std::span<const double> positions,
                             std::size_t from, std::size_t to, double range) {
    if (from == to) return 0;
    const std::ptrdiff_t dir = to > from ? 1 : -1;
    std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(from);
    const std::ptrdiff_t dest = static_cast<std::ptrdiff_t>(to);
    int hops = 0;
    while (cur != dest) {
        std::ptrdiff_t next = cur;
        for (std::ptrdiff_t j = cur + dir; ; j += dir) {
            if (std::abs(positions[static_cast<std::size_t>(j)] -
                         positions[static_cast<std::size_t>(cur)]) > range) {
                break;  // positions are monotone, nothing farther is reachable
            }
            next = j;
            if (j == dest) break;
        }
        if (next == cur) return std::nullopt;
        cur = next;
        ++hops;
    }
    return hops;
}

Channel::Channel(ChannelParams params, int vehicle_count, std::uint64_t seed)
    : params_(params),
      vehicle_count_(vehicle_count),
      next_serial_(static_cast<std::size_t>(vehicle_count), 1),
      tables_(static_cast<std::size_t>(vehicle_count)),
      rng_(seed) {}

StateMessage Channel::broadcast(double t, int origin, double position, double speed,
                                std::span<const double> positions) {
    StateMessage m{origin, next_serial_[static_cast<std::size_t>(origin)]++, t, position, speed};
    if (!params_.enabled) return m;
    for (int r = 0; r < vehicle_count_; ++r) {
        if (r == origin) continue;
        const auto hops = hop_count(positions, static_cast<std::size_t>(origin),
                                    static_cast<std::size_t>(r), params_.radio_range);
        if (!hops) continue;
        double delay = *hops * params_.hop_delay + std::max(0, *hops - 1) * params_.relay_compute;
        if (params_.jitter > 0.0) {
            delay += std::uniform_real_distribution<double>(0.0, params_.jitter)(rng_);
        }
        pending_.push_back({r, {m, t + delay, *hops}});
    }
    return m;
}

void Channel::enqueue(int receiver, const StateMessage& m, double delivered_at, int hops) {
    pending_.push_back({receiver, {m, delivered_at, hops}});
}

std::vector<std::pair<int, DeliveryRecord>> Channel::deliver(double t) {
    const double horizon = t + 1e-9;
    std::vector<Pending> due;
    std::size_t kept = 0;
    for (Pending& pd : pending_) {
        if (pd.record.delivered_at <= horizon) {
            due.push_back(pd);
        } else {
            pending_[kept++] = pd;
        }
    }
    pending_.resize(kept);

    // fixed processing order makes the result independent of enqueue order
    std::sort(due.begin(), due.end(), [](const Pending& a, const Pending& b) {
        if (a.record.delivered_at != b.record.delivered_at)
            return a.record.delivered_at < b.record.delivered_at;
        if (a.record.message.origin != b.record.message.origin)
            return a.record.message.origin < b.record.message.origin;
        if (a.record.message.serial != b.record.message.serial)
            return a.record.message.serial < b.record.message.serial;
        return a.receiver < b.receiver;
    });

    std::vector<std::pair<int, DeliveryRecord>> accepted;
    for (const Pending& pd : due) {
        auto& table = tables_[static_cast<std::size_t>(pd.receiver)];
        const auto it = table.find(pd.record.message.origin);
        // duplicate discovery: drop copies and anything older than what is held
        if (it != table.end() && it->second.message.serial >= pd.record.message.serial) continue;
        table[pd.record.message.origin] = pd.record;
        accepted.emplace_back(pd.receiver, pd.record);
        log_.push_back({pd.record.message.emitted_at, pd.record.message.origin,
                        pd.record.message.serial, pd.receiver, pd.record.delivered_at,
                        pd.record.hops});
    }
    return accepted;
}

const std::map<int, DeliveryRecord>& Channel::received(int receiver) const {
    return tables_[static_cast<std::size_t>(receiver)];
}

void write_channel_log_csv(std::ostream& os, std::span<const DeliveryLogRow> rows) {
    os << "t_emit,origin,serial,receiver,t_deliver,hops\n";
    for (const DeliveryLogRow& r : rows) {
        os << format_double(r.t_emit) << ',' << r.origin << ',' << r.serial << ','
           << r.receiver << ',' << format_double(r.t_deliver) << ',' << r.hops << '\n';
    }
}

}  // namespace mesoacc
