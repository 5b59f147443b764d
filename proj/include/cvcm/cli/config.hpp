// Run configuration read from a JSON file.
//
// Units are natural: hbar = m = k_B = 1. A minimal file:
//
//   {
//     "system":   {"frequency": 1, "temperature": 1},
//     "unit":     {"size": 4, "frequency": 1, "internal_coupling": 0.67, "temperature": 1},
//     "coupling": {"kind": "spring", "strength": "raw", "mode": "com", "value": 15},
//     "dt": 0.01, "steps": 10000, "mode": "discrete_recursion",
//     "outputs":  {"trajectory": "traj.csv", "ledger": "ledger.csv", "summary": "summary.json"}
//   }
//
// "mode" in the coupling section is "com", "max" or a 1-based mode index;
// "weights" (one per oscillator) replaces "mode"/"value". Optional keys:
// "drain" {frequency, temperature, rate}, "ode_step", "record_every",
// "preset", "sweep" {"parameter", "start", "stop", "count"}.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvcm/engine.hpp"
#include "cvcm/errors.hpp"

namespace cvcm::cli {

/// Malformed or inconsistent configuration. `where` is "line L, column C" for
/// syntax errors and a JSON pointer such as "/unit/size" for field errors.
class ConfigError : public ModelError {
public:
    ConfigError(std::string where, const std::string& message)
        : ModelError(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}

    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct OutputPaths {
    std::string trajectory;
    std::string ledger;
    std::string summary;
    std::string sweep;
};

/// Uniform grid param = start, ..., stop with `count` points.
struct SweepSpec {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    long count = 0;

    std::vector<double> values() const;
};

struct RunConfig {
    CollisionScenario scenario;
    OutputPaths outputs;
    std::optional<long> record_every;
    std::optional<std::string> preset;
    std::optional<SweepSpec> sweep;

    /// 1 for collision runs, ceil((t_end / h) / 1e4) for ODE runs unless set.
    long effective_record_every() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// "<param>=<start>:<stop>:<n>".
SweepSpec parse_sweep(std::string_view text);

/// Parameters a sweep may vary.
const std::vector<std::string>& sweep_parameters();

/// Sets a sweepable parameter on the scenario. unit.size is rounded.
void apply_parameter(CollisionScenario& s, std::string_view parameter, double value);

/// Scenario of a preset that describes a single run (fig4, fig5, fig6).
CollisionScenario preset_scenario(std::string_view name);

} // namespace cvcm::cli
