#pragma once

#include <string>

namespace nhpc {

enum class Flag : unsigned {
    variance_clamped = 1u << 0,   // small negative variance from rounding, set to 0
    mean_clamped = 1u << 1,       // small negative mean from rounding, set to 0
    precision_warning = 1u << 2,  // a contributing table entry lost more than 12 digits
    tail_event = 1u << 3,         // conditioning event has probability below 1e-300
};

struct PredictionResult {
    double mean = 0.0;
    double variance = 0.0;
    double log_pmf = 0.0;      // ln P(conditioning event); 0 when not applicable
    double lost_digits = 0.0;  // worst cancellation among contributing entries
    unsigned flags = 0;

    bool has(Flag f) const noexcept { return (flags & static_cast<unsigned>(f)) != 0; }
    void set(Flag f) noexcept { flags |= static_cast<unsigned>(f); }
};

// "variance_clamped|tail_event"; empty string for no flags.
std::string flags_to_string(unsigned flags);

inline constexpr double kNegativeTolerance = 1e-9;
inline constexpr double kPrecisionAlarmDigits = 12.0;
inline constexpr double kTailLogPmf = -690.77552789821368;  // ln 1e-300

}  // namespace nhpc
