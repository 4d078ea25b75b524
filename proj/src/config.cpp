#include "minary/config.hpp"

#include <cmath>
#include <string>

namespace minary {

namespace {

// Marsaglia-Tsang gamma sampler, extended to shape < 1 via the boost
// gamma(a) = gamma(a+1) * U^(1/a).
double sample_gamma(Rng& rng, double shape) {
    if (shape < 1.0) {
        const double u = rng.u01();
        return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        // Marsaglia polar normal draw.
        double x, y, s;
        do {
            x = 2.0 * rng.u01() - 1.0;
            y = 2.0 * rng.u01() - 1.0;
            s = x * x + y * y;
        } while (s >= 1.0 || s == 0.0);
        const double normal = x * std::sqrt(-2.0 * std::log(s) / s);

        const double v = std::pow(1.0 + c * normal, 3);
        if (v <= 0.0) continue;
        const double u = rng.u01();
        if (u < 1.0 - 0.0331 * std::pow(normal, 4)) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * normal * normal + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

}  // namespace

SignalDistribution SignalDistribution::uniform01() {
    SignalDistribution d;
    d.kind = Kind::Uniform01;
    d.mean = 0.5;
    d.stddev = 1.0 / std::sqrt(12.0);
    return d;
}

SignalDistribution SignalDistribution::point(double c) {
    SignalDistribution d;
    d.kind = Kind::Point;
    d.a = c;
    d.mean = c;
    d.stddev = 0.0;
    return d;
}

SignalDistribution SignalDistribution::beta(double a, double b) {
    SignalDistribution d;
    d.kind = Kind::Beta;
    d.a = a;
    d.b = b;
    d.mean = a / (a + b);
    d.stddev = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
    return d;
}

double SignalDistribution::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Uniform01:
            return rng.u01();
        case Kind::Point:
            return a;
        case Kind::Beta: {
            const double x = sample_gamma(rng, a);
            const double y = sample_gamma(rng, b);
            return x / (x + y);
        }
    }
    return 0.0;
}

std::string SignalDistribution::name() const {
    switch (kind) {
        case Kind::Uniform01:
            return "uniform01";
        case Kind::Point:
            return "point(" + std::to_string(a) + ")";
        case Kind::Beta:
            return "beta(" + std::to_string(a) + "," + std::to_string(b) + ")";
    }
    return "?";
}

const SimConfig& validate(const SimConfig& cfg) {
    if (cfg.n < 1 || cfg.m < 1)
        throw ConfigError(ConfigErrorCode::BadShape,
                          "n and m must be positive (n=" + std::to_string(cfg.n) +
                              ", m=" + std::to_string(cfg.m) + ")");
    if (cfg.k < 1 || cfg.k > cfg.m)
        throw ConfigError(ConfigErrorCode::KOutOfRange,
                          "k must satisfy 1 <= k <= m (k=" + std::to_string(cfg.k) +
                              ", m=" + std::to_string(cfg.m) + ")");
    const double upper = cfg.relax_alpha ? 1.0 : 2.0 / 3.0;
    if (!(cfg.alpha > 0.0 && cfg.alpha < upper))
        throw ConfigError(ConfigErrorCode::AlphaOutOfRange,
                          "alpha=" + std::to_string(cfg.alpha) +
                              " outside (0, " + std::to_string(upper) + ")" +
                              (cfg.relax_alpha ? " [relaxed bound]" : ""));
    switch (cfg.mu.kind) {
        case SignalDistribution::Kind::Uniform01:
            break;
        case SignalDistribution::Kind::Point:
            if (!(cfg.mu.a >= 0.0 && cfg.mu.a <= 1.0))
                throw ConfigError(ConfigErrorCode::BadDistribution,
                                  "point mass " + std::to_string(cfg.mu.a) +
                                      " outside [0,1]");
            break;
        case SignalDistribution::Kind::Beta:
            if (!(cfg.mu.a > 0.0) || !(cfg.mu.b > 0.0))
                throw ConfigError(ConfigErrorCode::BadDistribution,
                                  "beta shapes must be positive");
            break;
    }
    return cfg;
}

void validate_competency(const Matrix& C, const SimConfig& cfg) {
    if (C.rows() != cfg.n || C.cols() != cfg.m)
        throw ConfigError(ConfigErrorCode::BadShape,
                          "competency shape " + std::to_string(C.rows()) + "x" +
                              std::to_string(C.cols()) + " does not match n=" +
                              std::to_string(cfg.n) + ", m=" + std::to_string(cfg.m));
    for (Eigen::Index i = 0; i < C.rows(); ++i)
        for (Eigen::Index j = 0; j < C.cols(); ++j)
            if (!(C(i, j) >= 0.0 && C(i, j) <= 1.0))
                throw ConfigError(ConfigErrorCode::BadCompetency,
                                  "competency[" + std::to_string(i + 1) + "][" +
                                      std::to_string(j + 1) + "]=" +
                                      std::to_string(C(i, j)) + " outside [0,1]");
}

}  // namespace minary
