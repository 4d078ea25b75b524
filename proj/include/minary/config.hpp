#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "minary/numerics.hpp"
#include "minary/rng.hpp"

namespace minary {

enum class ConfigErrorCode {
    KOutOfRange,
    AlphaOutOfRange,
    BadCompetency,
    BadDistribution,
    BadShape,
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ConfigErrorCode code() const { return code_; }

private:
    ConfigErrorCode code_;
};

// Signal distribution on [0,1]. The analytic mean/stddev are stored alongside
// the parameters; the estimators and closed forms consume them directly.
struct SignalDistribution {
    enum class Kind { Uniform01, Point, Beta };

    Kind kind = Kind::Uniform01;
    double a = 0.0;  // Point: the atom c. Beta: shape a.
    double b = 0.0;  // Beta: shape b.
    double mean = 0.5;
    double stddev = 0.28867513459481288225;  // 1/sqrt(12)

    static SignalDistribution uniform01();
    static SignalDistribution point(double c);
    static SignalDistribution beta(double a, double b);

    // One draw from the distribution. Point consumes no rng words; Beta
    // consumes a stream-position-deterministic but variable number.
    double sample(Rng& rng) const;

    std::string name() const;
};

struct SimConfig {
    int n = 1;                  // perspectives
    int m = 1;                  // semantic dimensions
    int k = 1;                  // active dimensions per step
    double alpha = 0.02;        // EMA step size
    SignalDistribution mu;      // signal law on [0,1]
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    // Relaxes the alpha bound from (0, 2/3) to (0, 1). Echoed in all reports.
    bool relax_alpha = false;
};

// Returns cfg unchanged iff every invariant holds, else throws ConfigError.
const SimConfig& validate(const SimConfig& cfg);

// Every competency must lie in [0,1] and match the configured shape.
void validate_competency(const Matrix& C, const SimConfig& cfg);

}  // namespace minary
