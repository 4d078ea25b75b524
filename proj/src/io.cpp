#include "minary/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "minary/model.hpp"

namespace minary {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_double_17(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

Matrix competency_from_rule(const HaloRule& rule, int n, int m) {
    if (rule.expert_row < 1 || rule.expert_row > n || rule.expert_col < 1 ||
        rule.expert_col > m)
        throw ConfigError(ConfigErrorCode::BadShape,
                          "competency rule expert cell (" +
                              std::to_string(rule.expert_row) + "," +
                              std::to_string(rule.expert_col) +
                              ") outside the configured shape");
    Matrix C = Matrix::Constant(n, m, rule.lo);
    C(rule.expert_row - 1, rule.expert_col - 1) = rule.hi;
    return C;
}

namespace {

template <class T>
T require_field(const json& doc, const std::string& key) {
    if (!doc.contains(key))
        throw ConfigError(ConfigErrorCode::BadShape, "missing config field '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(ConfigErrorCode::BadShape,
                          "config field '" + key + "' has the wrong type");
    }
}

SignalDistribution mu_from_json(const json& doc) {
    const std::string kind = require_field<std::string>(doc, "kind");
    if (kind == "uniform01") return SignalDistribution::uniform01();
    if (kind == "point") return SignalDistribution::point(require_field<double>(doc, "c"));
    if (kind == "beta")
        return SignalDistribution::beta(require_field<double>(doc, "a"),
                                        require_field<double>(doc, "b"));
    throw ConfigError(ConfigErrorCode::BadDistribution,
                      "mu.kind '" + kind + "' not one of uniform01 | point | beta");
}

json mu_to_json(const SignalDistribution& mu) {
    json doc;
    switch (mu.kind) {
        case SignalDistribution::Kind::Uniform01:
            doc["kind"] = "uniform01";
            break;
        case SignalDistribution::Kind::Point:
            doc["kind"] = "point";
            doc["c"] = mu.a;
            break;
        case SignalDistribution::Kind::Beta:
            doc["kind"] = "beta";
            doc["a"] = mu.a;
            doc["b"] = mu.b;
            break;
    }
    return doc;
}

}  // namespace

SystemConfig config_from_json_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(ConfigErrorCode::BadShape,
                          std::string("config is not valid JSON: ") + e.what());
    }

    SystemConfig config;
    config.sim.n = require_field<int>(doc, "n");
    config.sim.m = require_field<int>(doc, "m");
    config.sim.k = require_field<int>(doc, "k");
    config.sim.alpha = require_field<double>(doc, "alpha");
    if (!doc.contains("mu"))
        throw ConfigError(ConfigErrorCode::BadShape, "missing config field 'mu'");
    config.sim.mu = mu_from_json(doc.at("mu"));
    config.sim.seed = require_field<std::uint64_t>(doc, "seed");
    config.sim.steps = require_field<std::uint64_t>(doc, "steps");
    if (doc.contains("relax_alpha"))
        config.sim.relax_alpha = require_field<bool>(doc, "relax_alpha");

    validate(config.sim);

    if (!doc.contains("competency"))
        throw ConfigError(ConfigErrorCode::BadShape, "missing config field 'competency'");
    const json& comp = doc.at("competency");
    if (comp.is_object()) {
        const std::string rule_name = require_field<std::string>(comp, "rule");
        if (rule_name != "halo")
            throw ConfigError(ConfigErrorCode::BadShape,
                              "competency.rule '" + rule_name + "' not recognized");
        HaloRule rule;
        rule.expert_row = require_field<int>(comp, "expert_row");
        rule.expert_col = require_field<int>(comp, "expert_col");
        rule.hi = require_field<double>(comp, "hi");
        rule.lo = require_field<double>(comp, "lo");
        config.rule = rule;
        config.competency = competency_from_rule(rule, config.sim.n, config.sim.m);
    } else if (comp.is_array()) {
        if (static_cast<int>(comp.size()) != config.sim.n)
            throw ConfigError(ConfigErrorCode::BadShape,
                              "competency has " + std::to_string(comp.size()) +
                                  " rows, expected n=" + std::to_string(config.sim.n));
        config.competency = Matrix(config.sim.n, config.sim.m);
        for (int i = 0; i < config.sim.n; ++i) {
            const json& row = comp.at(static_cast<std::size_t>(i));
            if (!row.is_array() || static_cast<int>(row.size()) != config.sim.m)
                throw ConfigError(ConfigErrorCode::BadShape,
                                  "competency row " + std::to_string(i + 1) +
                                      " does not have m=" + std::to_string(config.sim.m) +
                                      " entries");
            for (int j = 0; j < config.sim.m; ++j)
                config.competency(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
        }
    } else {
        throw ConfigError(ConfigErrorCode::BadShape,
                          "config field 'competency' must be a 2D array or a rule object");
    }

    validate_competency(config.competency, config.sim);
    return config;
}

std::string config_to_json_string(const SystemConfig& config) {
    json doc;
    doc["n"] = config.sim.n;
    doc["m"] = config.sim.m;
    doc["k"] = config.sim.k;
    doc["alpha"] = config.sim.alpha;
    doc["mu"] = mu_to_json(config.sim.mu);
    doc["seed"] = config.sim.seed;
    doc["steps"] = config.sim.steps;
    if (config.sim.relax_alpha) doc["relax_alpha"] = true;
    if (config.rule) {
        doc["competency"] = {{"rule", "halo"},
                             {"expert_row", config.rule->expert_row},
                             {"expert_col", config.rule->expert_col},
                             {"hi", config.rule->hi},
                             {"lo", config.rule->lo}};
    } else {
        json rows = json::array();
        for (Eigen::Index i = 0; i < config.competency.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < config.competency.cols(); ++j)
                row.push_back(config.competency(i, j));
            rows.push_back(std::move(row));
        }
        doc["competency"] = std::move(rows);
    }
    return doc.dump(2) + "\n";
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return config_from_json_string(text.str());
}

void save_config(const SystemConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write config file: " + path.string());
    out << config_to_json_string(config);
    if (!out) throw IoError("failed writing config file: " + path.string());
}

SeriesWriter::SeriesWriter(const std::filesystem::path& path, int n) : path_(path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot open series file: " + path.string());
    file_ = f;
    buffer_ = "step,gbar,active";
    for (int i = 1; i <= n; ++i) buffer_ += ",d_" + std::to_string(i);
    buffer_ += "\n";
}

void SeriesWriter::row(std::uint64_t step, double gbar,
                       const std::vector<int>& active, const Vector& learning) {
    buffer_ += std::to_string(step);
    buffer_ += ',';
    buffer_ += format_double(gbar);
    buffer_ += ',';
    for (std::size_t c = 0; c < active.size(); ++c) {
        if (c) buffer_ += '|';
        buffer_ += std::to_string(active[c] + 1);
    }
    for (Eigen::Index i = 0; i < learning.size(); ++i) {
        buffer_ += ',';
        buffer_ += format_double(learning[i]);
    }
    buffer_ += '\n';
    if (buffer_.size() > (1u << 20)) {
        std::fwrite(buffer_.data(), 1, buffer_.size(), static_cast<std::FILE*>(file_));
        buffer_.clear();
    }
}

void SeriesWriter::close() {
    if (!file_) return;
    std::FILE* f = static_cast<std::FILE*>(file_);
    if (!buffer_.empty()) std::fwrite(buffer_.data(), 1, buffer_.size(), f);
    buffer_.clear();
    const bool ok = std::fflush(f) == 0;
    std::fclose(f);
    file_ = nullptr;
    if (!ok) throw IoError("failed writing series file: " + path_.string());
}

SeriesWriter::~SeriesWriter() {
    try {
        close();
    } catch (...) {
    }
}

void write_delta_snapshot(const std::filesystem::path& path, const Matrix& delta,
                          std::uint64_t t, std::uint64_t seed,
                          const std::string& version) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write snapshot: " + path.string());
    out << "{\n  \"version\": \"" << version << "\",\n";
    out << "  \"seed\": " << seed << ",\n";
    out << "  \"t\": " << t << ",\n";
    out << "  \"n\": " << delta.rows() << ",\n";
    out << "  \"m\": " << delta.cols() << ",\n";
    out << "  \"entries\": [\n";
    for (Eigen::Index i = 0; i < delta.rows(); ++i) {
        out << "    [";
        for (Eigen::Index j = 0; j < delta.cols(); ++j) {
            if (j) out << ", ";
            out << format_double_17(delta(i, j));
        }
        out << (i + 1 < delta.rows() ? "],\n" : "]\n");
    }
    out << "  ]\n}\n";
    if (!out) throw IoError("failed writing snapshot: " + path.string());
}

Matrix read_delta_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read snapshot: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw IoError(std::string("snapshot is not valid JSON: ") + e.what());
    }
    const auto& entries = doc.at("entries");
    const int n = doc.at("n").get<int>();
    const int m = doc.at("m").get<int>();
    Matrix delta(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            delta(i, j) = entries.at(static_cast<std::size_t>(i))
                              .at(static_cast<std::size_t>(j))
                              .get<double>();
    return delta;
}

void write_verify_json(const std::filesystem::path& path,
                       const std::vector<SuiteResult>& suites) {
    json doc;
    doc["suites"] = json::array();
    bool all_pass = true;
    for (const SuiteResult& suite : suites) {
        json s;
        s["suite"] = suite.suite;
        s["pass"] = suite.passed();
        if (!suite.passed()) all_pass = false;
        s["checks"] = json::array();
        for (const VerifyCheck& check : suite.checks) {
            json c;
            c["name"] = check.name;
            c["pass"] = check.pass;
            c["observed"] = check.observed;
            c["bound"] = check.bound;
            if (!check.note.empty()) c["note"] = check.note;
            if (check.informational) c["informational"] = true;
            s["checks"].push_back(std::move(c));
        }
        doc["suites"].push_back(std::move(s));
    }
    doc["pass"] = all_pass;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("failed writing report: " + path.string());
}

RunArtifact simulate_to_files(const SystemConfig& config,
                              const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec && !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory: " + out_dir.string());

    RunArtifact artifact;
    artifact.series_csv = out_dir / "series.csv";
    artifact.delta_json = out_dir / "delta_final.json";
    artifact.config_echo = out_dir / "config.json";

    const auto start = std::chrono::steady_clock::now();
    save_config(config, artifact.config_echo);

    SeriesWriter series(artifact.series_csv, config.sim.n);
    double last_gbar = 0.0;
    std::uint64_t rows = 0;
    const Matrix final_delta =
        run(config.sim, config.competency, Matrix::Zero(config.sim.n, config.sim.m),
            [&](const StepTrace& trace) {
                series.row(trace.t, trace.normalized, trace.active, trace.learning);
                last_gbar = trace.normalized;
                ++rows;
            });
    series.close();

    write_delta_snapshot(artifact.delta_json, final_delta, config.sim.steps,
                         config.sim.seed, "0.1.0");

    artifact.rows = rows;
    artifact.final_gbar = last_gbar;
    artifact.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return artifact;
}

}  // namespace minary
