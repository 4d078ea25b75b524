#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "minary/config.hpp"
#include "minary/model.hpp"

namespace minary {

struct UnknownScenario : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Where an expected value comes from: a published table rounded to a few
// digits (loose tolerance), or exact rational arithmetic (1e-12).
enum class ValueSource { Rounded, Exact };

struct ExpectedValue {
    enum class Field { Raw, Averaged, Consensus, Normalized, Learning, DeltaAfter };
    Field field;
    int i = 0;  // 0-based perspective
    int j = 0;  // 0-based dimension (Raw / DeltaAfter only)
    double value = 0.0;
    double tol = 0.0;
    ValueSource source = ValueSource::Exact;
};

struct ForcedStep {
    ActiveSet active;             // 0-based
    std::vector<double> signals;  // aligned with active
};

struct Scenario {
    std::string name;
    SimConfig config;
    Matrix competency;
    std::vector<ForcedStep> forced;        // golden schedule (bypasses the rng)
    std::vector<ExpectedValue> expected;   // checks on the first forced step
    std::uint64_t free_run_steps = 0;      // seeded long-horizon run
    // Reference sign pattern for the long-run memory state, when one is
    // published; compared report-only (the published schedules are unknown).
    Matrix long_run_reference;  // empty if none
};

struct CheckOutcome {
    std::string name;
    bool pass = false;
    double got = 0.0;
    double want = 0.0;
    double tol = 0.0;
    ValueSource source = ValueSource::Exact;
};

struct ScenarioVerdict {
    std::string name;
    bool pass = false;
    std::vector<CheckOutcome> golden;
    StepTrace first_trace;
    // free-running qualitative checks
    bool bounded = true;
    double max_abs_delta = 0.0;
    bool conservation_ok = true;
    double max_abs_learning_sum = 0.0;
    std::string structure_note;  // report-only long-run summary
};

Scenario scenario(const std::string& name);

ScenarioVerdict run_scenario(const std::string& name);

}  // namespace minary
