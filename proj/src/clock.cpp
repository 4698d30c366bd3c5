#include "gpoo/clock.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace gpoo {

std::string_view clock_mode_name(ClockMode mode) { return mode == ClockMode::Virtual ? "virtual" : "real"; }

ClockMode clock_mode_from_name(std::string_view name) {
    if (name == "virtual") return ClockMode::Virtual;
    if (name == "real") return ClockMode::Real;
    throw std::invalid_argument("unknown clock mode '" + std::string(name) + "' (expected virtual|real)");
}

std::string_view component_name(Component c) {
    switch (c) {
        case Component::Objective: return "objective";
        case Component::Posterior: return "posterior_update";
        case Component::Acquisition: return "acquisition";
        case Component::Partition: return "partition";
        case Component::Queue: return "queue";
    }
    return "?";
}

std::int64_t TimingBreakdown::component_sum() const { return std::accumulate(ns.begin(), ns.end(), std::int64_t{0}); }

RunClock::RunClock(ClockMode mode, double ns_per_op)
    : mode_(mode), ns_per_op_(ns_per_op), start_(std::chrono::steady_clock::now()) {
    if (!(ns_per_op >= 0.0)) throw std::invalid_argument("RunClock: ns_per_op must be >= 0");
}

RunClock::Section::Section(RunClock& clk, Component comp)
    : clock(clk), c(comp), t0(std::chrono::steady_clock::now()) {}

RunClock::Section::~Section() {
    const auto dt = std::chrono::steady_clock::now() - t0;
    clock.advance(c, std::chrono::duration_cast<std::chrono::nanoseconds>(dt).count());
}

void RunClock::advance(Component c, std::int64_t ns) {
    ns_[static_cast<std::size_t>(c)] += ns;
    if (mode_ == ClockMode::Virtual) virtual_ns_ += ns;
}

void RunClock::pay_cost(double seconds) {
    if (!(seconds >= 0.0)) throw std::invalid_argument("evaluation cost must be >= 0");
    if (seconds == 0.0) return;
    if (mode_ == ClockMode::Virtual) {
        advance(Component::Objective, static_cast<std::int64_t>(seconds * 1e9));
        return;
    }
    Section s(*this, Component::Objective);
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

std::int64_t RunClock::elapsed_ns() const {
    if (mode_ == ClockMode::Virtual) return virtual_ns_;
    const auto dt = std::chrono::steady_clock::now() - start_;
    last_reported_ = std::max(last_reported_, std::chrono::duration_cast<std::chrono::nanoseconds>(dt).count());
    return last_reported_;
}

TimingBreakdown RunClock::breakdown() const {
    TimingBreakdown b;
    b.ns = ns_;
    b.total_ns = std::max(elapsed_ns(), b.component_sum());
    return b;
}

}  // namespace gpoo
