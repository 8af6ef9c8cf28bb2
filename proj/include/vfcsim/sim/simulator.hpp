#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace vfcsim::sim {

using SimTime = double;  // seconds

struct RunSummary {
    std::uint64_t events_processed = 0;
    SimTime final_clock = 0.0;
};

class CausalityError : public std::runtime_error {
public:
    explicit CausalityError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic discrete-event engine. Single-threaded; ties broken by
// insertion sequence so the trace is reproducible regardless of payload.
class Simulator {
public:
    using Handler = std::function<void()>;
    using EventHandle = std::uint64_t;

    SimTime now() const { return now_; }

    EventHandle schedule(SimTime fire_at, Handler handler) {
        if (fire_at < now_) {
            throw CausalityError("schedule: fire_at " + std::to_string(fire_at) +
                                 " precedes clock " + std::to_string(now_));
        }
        EventHandle h = next_sequence_++;
        queue_.push(Entry{fire_at, h, std::move(handler)});
        ++scheduled_;
        return h;
    }

    EventHandle schedule_in(SimTime delay, Handler handler) {
        return schedule(now_ + delay, std::move(handler));
    }

    // True iff the event was pending; cancelled events never fire.
    bool cancel(EventHandle h) {
        if (h >= next_sequence_) return false;
        if (cancelled_.count(h) || fired_.count(h)) return false;
        cancelled_.insert(h);
        ++cancelled_count_;
        return true;
    }

    RunSummary run_until(SimTime t_end) {
        if (t_end < now_) {
            throw CausalityError("run_until: t_end precedes clock");
        }
        RunSummary summary;
        while (!queue_.empty() && queue_.top().fire_at <= t_end) {
            Entry e = queue_.top();
            queue_.pop();
            if (cancelled_.count(e.sequence)) {
                cancelled_.erase(e.sequence);
                continue;
            }
            now_ = e.fire_at;
            fired_.insert(e.sequence);
            e.handler();
            ++summary.events_processed;
            ++processed_;
        }
        now_ = t_end;
        summary.final_clock = now_;
        return summary;
    }

    std::uint64_t events_scheduled() const { return scheduled_; }
    std::uint64_t events_processed() const { return processed_; }
    std::uint64_t events_cancelled() const { return cancelled_count_; }
    bool quiescent() const { return queue_.size() == cancelled_.size(); }

private:
    struct Entry {
        SimTime fire_at;
        std::uint64_t sequence;
        Handler handler;
        bool operator>(const Entry& o) const {
            if (fire_at != o.fire_at) return fire_at > o.fire_at;
            return sequence > o.sequence;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    SimTime now_ = 0.0;
    std::uint64_t next_sequence_ = 0;
    std::uint64_t scheduled_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t cancelled_count_ = 0;
    std::unordered_set<std::uint64_t> cancelled_;
    std::unordered_set<std::uint64_t> fired_;
};

}  // namespace vfcsim::sim
