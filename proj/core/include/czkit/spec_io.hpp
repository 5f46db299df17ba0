#ifndef CZKIT_SPEC_IO_HPP_
#define CZKIT_SPEC_IO_HPP_

#include <cstdint>
#include <string>

#include "czkit/afd.hpp"
#include "czkit/reduction.hpp"

namespace czkit {

/// A full scenario description: one or more models with shared uncertainty
/// bounds, input range, reduction limits, and run parameters.
struct ScenarioSpec {
    ModelBank bank;
    ReductionLimits limits{15, 5};
    int horizon = 100;
    double epsilon = 0.01;
    std::uint64_t seed = 1;

    UncertaintyBounds bounds() const { return {bank.X0, bank.W, bank.V, bank.Xa}; }
};

/// Parse/serialize a scenario as a JSON document. Parsing errors throw
/// std::runtime_error naming the offending field; parse(serialize(s)) yields
/// identical in-memory values.
ScenarioSpec parse_scenario(const std::string& json_text);
std::string serialize_scenario(const ScenarioSpec& spec);

ScenarioSpec load_scenario(const std::string& path);
void save_scenario(const ScenarioSpec& spec, const std::string& path);

/// Input sequence file: a JSON array of arrays, one inner array per step.
InputSequence parse_input_sequence(const std::string& json_text, int n_u);
std::string serialize_input_sequence(const InputSequence& useq);
InputSequence load_input_sequence(const std::string& path, int n_u);

}  // namespace czkit

#endif
