#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string_view>

namespace gpoo {

enum class ClockMode { Virtual, Real };

[[nodiscard]] std::string_view clock_mode_name(ClockMode mode);
[[nodiscard]] ClockMode clock_mode_from_name(std::string_view name);

/// Buckets of the timing breakdown.
enum class Component : std::size_t { Objective, Posterior, Acquisition, Partition, Queue };
inline constexpr std::size_t kComponentCount = 5;

[[nodiscard]] std::string_view component_name(Component c);

struct TimingBreakdown {
    std::array<std::int64_t, kComponentCount> ns{};
    std::int64_t total_ns = 0;

    [[nodiscard]] std::int64_t operator[](Component c) const { return ns[static_cast<std::size_t>(c)]; }
    [[nodiscard]] std::int64_t component_sum() const;
    /// Everything except objective time.
    [[nodiscard]] std::int64_t overhead_ns() const { return total_ns - (*this)[Component::Objective]; }
};

/// Per-run time source.
///
/// Real mode measures each charged section with steady_clock and sleeps
/// for artificial evaluation costs. Virtual mode never reads the system
/// clock: a section advances logical time by (operation count × ns_per_op)
/// and an evaluation cost c advances it by exactly c seconds, so traces are
/// byte-reproducible.
class RunClock {
public:
    /// Logical nanoseconds per work unit. Work units are calibrated so one
    /// unit takes about 1 ns on the reference machine; other values rescale
    /// the modeled overhead relative to evaluation costs.
    static constexpr double kDefaultNsPerOp = 1.0;

    explicit RunClock(ClockMode mode = ClockMode::Virtual, double ns_per_op = kDefaultNsPerOp);

    [[nodiscard]] ClockMode mode() const { return mode_; }
    [[nodiscard]] double ns_per_op() const { return ns_per_op_; }

    /// Run `fn` and attribute its time to `c`; `ops` is the modeled work used in virtual mode.
    template <class F>
    decltype(auto) charge(Component c, double ops, F&& fn) {
        if (mode_ == ClockMode::Virtual) {
            advance(c, static_cast<std::int64_t>(ops * ns_per_op_));
            return fn();
        }
        Section s(*this, c);
        return fn();
    }

    /// Add an artificial evaluation cost of `seconds` to the objective bucket.
    void pay_cost(double seconds);

    /// Monotone elapsed time since construction.
    [[nodiscard]] std::int64_t elapsed_ns() const;

    [[nodiscard]] TimingBreakdown breakdown() const;

private:
    struct Section {
        Section(RunClock& clock, Component c);
        ~Section();
        RunClock& clock;
        Component c;
        std::chrono::steady_clock::time_point t0;
    };

    void advance(Component c, std::int64_t ns);

    ClockMode mode_;
    double ns_per_op_;
    std::chrono::steady_clock::time_point start_;
    std::array<std::int64_t, kComponentCount> ns_{};
    std::int64_t virtual_ns_ = 0;
    mutable std::int64_t last_reported_ = 0;
};

}  // namespace gpoo
