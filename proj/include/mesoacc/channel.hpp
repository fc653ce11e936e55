#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mesoacc {

// Vehicle state snapshot propagated through the channel. The (origin,
// serial) pair identifies a message; serials grow per origin.
struct StateMessage {
    int origin = 0;
    std::uint64_t serial = 0;
    double emitted_at = 0.0;  // [s]
    double position = 0.0;    // [m]
    double speed = 0.0;       // [m/s]

    bool operator==(const StateMessage&) const = default;
};

struct ChannelParams {
    double radio_range = 750.0;     // single-hop reach [m]
    double hop_delay = 0.020;       // per-hop transmission delay [s]
    double max_end_to_end = 0.100;  // delay budget for safety data [s]
    double broadcast_period = 0.1;  // state broadcast cadence [s]
    double relay_compute = 0.0;     // processing time per relay node [s]
    double jitter = 0.0;            // uniform extra delay in [0, jitter) per delivery [s]
    bool enabled = true;

    std::vector<std::string> validate() const;

    bool operator==(const ChannelParams&) const = default;
};

struct DeliveryRecord {
    StateMessage message;
    double delivered_at = 0.0;
    int hops = 0;
};

// One accepted delivery, for CSV export.
struct DeliveryLogRow {
    double t_emit = 0.0;
    int origin = 0;
    std::uint64_t serial = 0;
    int receiver = 0;
    double t_deliver = 0.0;
    int hops = 0;
};

// Minimum hop count from one vehicle to another over in-between relays,
// each hop spanning at most `range`. Positions must be monotone in index
// (vehicles sorted by location). Greedy farthest-reachable choice, which
// is optimal on a line. Empty result when some gap exceeds the range.
std::optional<int> hop_count(std::span<const double> positions,
                             std::size_t from, std::size_t to, double range);

// Range-limited multi-hop broadcast channel with deterministic per-hop
// delay and duplicate discovery. Owned and advanced by the simulation
// loop; not safe for concurrent mutation.
class Channel {
public:
    Channel(ChannelParams params, int vehicle_count, std::uint64_t seed = 0);

    // Stamps and sends the sender state at time t. Positions index all
    // vehicles (monotone by location) and fix the relay topology for this
    // message. Returns the stamped message.
    StateMessage broadcast(double t, int origin, double position, double speed,
                           std::span<const double> positions);

    // Queues an externally built delivery; used for alternative topologies
    // and duplicate-injection tests.
    void enqueue(int receiver, const StateMessage& m, double delivered_at, int hops);

    // Releases everything due by time t. Duplicates and serials older than
    // the newest one already held by a receiver are discarded. The result,
    // the receiver tables and the log are independent of enqueue order.
    std::vector<std::pair<int, DeliveryRecord>> deliver(double t);

    // Newest accepted delivery per origin, as seen by one receiver.
    const std::map<int, DeliveryRecord>& received(int receiver) const;

    const ChannelParams& params() const { return params_; }
    const std::vector<DeliveryLogRow>& log() const { return log_; }
    std::size_t pending_count() const { return pending_.size(); }

private:
    struct Pending {
        int receiver;
        DeliveryRecord record;
    };

    ChannelParams params_;
    int vehicle_count_;
    std::vector<std::uint64_t> next_serial_;
    std::vector<Pending> pending_;
    std::vector<std::map<int, DeliveryRecord>> tables_;
    std::vector<DeliveryLogRow> log_;
    std::mt19937_64 rng_;
};

// Columns: t_emit,origin,serial,receiver,t_deliver,hops
void write_channel_log_csv(std::ostream& os, std::span<const DeliveryLogRow> rows);

}  // namespace mesoacc
