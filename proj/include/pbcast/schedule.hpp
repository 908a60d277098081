#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbcast/centrality.hpp"
#include "pbcast/error.hpp"
#include "pbcast/rng.hpp"

namespace pbcast {

// Binary broadcast indicators for one communication round.
struct ScheduleVector {
    std::vector<std::uint8_t> v;
    std::uint64_t round = 0;

    int size() const { return static_cast<int>(v.size()); }
};

// Schedule source for one run. The vector for round t is a pure function of
// (seed, label, t), so replaying a stream always reproduces the identical
// broadcast sequence regardless of what other streams were consumed.
class ScheduleStream {
public:
    ScheduleStream(std::uint64_t seed, std::string label)
        : cs_(seed, std::move(label)) {}

    std::uint64_t seed() const { return cs_.seed(); }
    const std::string& label() const { return cs_.label(); }

    double uniform(std::uint64_t t, std::uint64_t i) const { return cs_.uniform(t, i); }

private:
    CounterStream cs_;
};

// Independent Bernoulli draws: v_i ~ B(p_i), so E[sum v] = K per round.
inline ScheduleVector schedule(const ScheduleStream& stream, const ProbabilityVector& p,
                               std::uint64_t t) {
    ScheduleVector sv;
    sv.round = t;
    sv.v.resize(p.size());
    for (int i = 0; i < p.size(); ++i)
        sv.v[i] = stream.uniform(t, static_cast<std::uint64_t>(i)) < p.p[i] ? 1 : 0;
    return sv;
}

// Transmission slots consumed by one round: one per broadcasting node.
inline std::uint64_t slots(const ScheduleVector& sv) {
    std::uint64_t s = 0;
    for (auto b : sv.v) s += b;
    return s;
}

// Audit log form, e.g. "17: 0110100".
inline std::string format_schedule_line(const ScheduleVector& sv) {
    std::string s = std::to_string(sv.round) + ": ";
    s.reserve(s.size() + sv.v.size());
    for (auto b : sv.v) s += b ? '1' : '0';
    return s;
}

}  // namespace pbcast
