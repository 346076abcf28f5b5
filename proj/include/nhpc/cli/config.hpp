#pragma once

// Run configuration: a strict JSON document. Unknown keys are errors so that a typo in a
// scientific config can never silently fall back to a default.
//
//   {
//     "model": {
//       "center":  {"type": "linear", "a": 30},
//       "cluster": {"family": "poisson", "mu": {"type": "linear", "a": 5}},
//       "delay":   {"type": "exponential", "rate": 2}            (optional)
//     },
//     "t": 1, "s": 1,
//     "m": 75 | "m_range": [10, 170] | "ell": 30,                (at most one)
//     "quadrature": {"rel_tol": 1e-10, "abs_tol": 1e-14, "max_depth": 40},   (optional)
//     "mc": {"replicates": 1000000, "seed": 42}                   (optional)
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nhpc/errors.hpp"
#include "nhpc/model.hpp"
#include "nhpc/quadrature.hpp"

namespace nhpc::cli {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct McSettings {
    long replicates = 1000000;
    std::uint64_t seed = 1;
};

enum class Selector { none, m, m_range, ell };

struct RunConfig {
    Scenario scenario;
    Selector selector = Selector::none;
    long lo = 0;  // m or ell for single-value selectors
    long hi = 0;
    QuadratureConfig quadrature;
    std::optional<McSettings> mc;
};

// Throws ConfigError: "line L, column C: ..." for syntax errors and "<key path>: ..." for
// schema violations. The scenario itself is validated as well.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace nhpc::cli
