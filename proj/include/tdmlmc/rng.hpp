#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tdmlmc {

// Abstract work units. One coordinate draw, one Markov step and one payoff
// evaluation each cost one unit.
struct CostLedger {
    std::uint64_t coordinate_draws = 0;
    std::uint64_t step_applications = 0;
    std::uint64_t payoff_evals = 0;

    std::uint64_t total() const { return coordinate_draws + step_applications + payoff_evals; }

    CostLedger& operator+=(const CostLedger& other)
    {
        coordinate_draws += other.coordinate_draws;
        step_applications += other.step_applications;
        payoff_evals += other.payoff_evals;
        return *this;
    }
    friend CostLedger operator+(CostLedger a, const CostLedger& b) { return a += b; }
    friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

/// Counter-based uniform stream on [0,1).
///
/// The stream is identified by (seed, path). Draw k of a stream is a pure
/// function of its key and k, so the sequence is reproducible regardless of
/// which thread consumes it. `fork(label)` derives a child keyed on the parent
/// key and the label; the parent is left untouched.
///
/// A stream is single-owner. Forked children may be used from other threads.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed);

    UniformStream fork(std::uint64_t label) const;

    double next();
    void draw(std::span<double> out);
    std::vector<double> draw(std::size_t n);

    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint64_t>& path() const { return path_; }
    std::uint64_t counter() const { return counter_; }

private:
    UniformStream(std::uint64_t seed, std::vector<std::uint64_t> path, std::uint64_t key);

    std::uint64_t seed_;
    std::vector<std::uint64_t> path_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline UniformStream new_stream(std::uint64_t seed) { return UniformStream(seed); }

// Draws into `out` and books the draws on the ledger.
inline void draw_coordinates(UniformStream& stream, std::span<double> out, CostLedger& ledger)
{
    stream.draw(out);
    ledger.coordinate_draws += out.size();
}

} // namespace tdmlmc
