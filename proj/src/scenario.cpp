#include "sancdyn/scenario.hpp"

#include <cmath>
#include <set>

namespace sancdyn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

const json& field(const json& doc, const std::string& key) {
    const auto it = doc.find(key);
    if (it == doc.end()) fail("scenario: missing required field \"" + key + "\"");
    return *it;
}

double real_field(const json& doc, const std::string& key) {
    const json& v = field(doc, key);
    if (!v.is_number()) fail("scenario: field \"" + key + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("scenario: field \"" + key + "\" must be finite");
    return d;
}

double positive_field(const json& doc, const std::string& key) {
    const double d = real_field(doc, key);
    if (d <= 0.0) fail("scenario: field \"" + key + "\" must be > 0");
    return d;
}

double non_negative_field(const json& doc, const std::string& key) {
    const double d = real_field(doc, key);
    if (d < 0.0) fail("scenario: field \"" + key + "\" must be >= 0");
    return d;
}

std::int64_t integer_field(const json& doc, const std::string& key, std::int64_t min_value) {
    const json& v = field(doc, key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        fail("scenario: field \"" + key + "\" must be an integer");
    }
    const auto n = v.get<std::int64_t>();
    if (n < min_value) {
        fail("scenario: field \"" + key + "\" must be >= " + std::to_string(min_value));
    }
    return n;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Deterministic: return "deterministic";
        case ModelKind::Stochastic: return "stochastic";
        case ModelKind::Lanchester: return "lanchester";
    }
    return "deterministic";
}

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("scenario: document must be a JSON object");

    const json& model = field(doc, "model");
    if (!model.is_string()) fail("scenario: field \"model\" must be a string");
    const std::string kind = model.get<std::string>();

    Scenario s;
    std::set<std::string> allowed = {"model", "alpha", "beta", "steps"};
    if (kind == "deterministic") {
        s.model = ModelKind::Deterministic;
        allowed.insert({"x0", "x1", "y0", "y1"});
    } else if (kind == "stochastic") {
        s.model = ModelKind::Stochastic;
        allowed.insert({"x0", "x1", "y0", "y1", "sigma_x", "sigma_y", "distribution", "seed",
                        "trajectories"});
    } else if (kind == "lanchester") {
        s.model = ModelKind::Lanchester;
        allowed.insert({"r0", "g0", "dt"});
    } else {
        fail("scenario: field \"model\" must be one of deterministic|stochastic|lanchester");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!allowed.contains(key)) {
            fail("scenario: unknown field \"" + key + "\" for model " + kind);
        }
    }

    s.alpha = positive_field(doc, "alpha");
    s.beta = positive_field(doc, "beta");
    if (!std::isfinite(s.alpha * s.beta)) fail("scenario: total gain alpha*beta must be finite");
    s.steps = integer_field(doc, "steps", 1);

    if (s.model == ModelKind::Deterministic || s.model == ModelKind::Stochastic) {
        s.x0 = real_field(doc, "x0");
        s.x1 = real_field(doc, "x1");
        s.y0 = real_field(doc, "y0");
        s.y1 = real_field(doc, "y1");
    }
    if (s.model == ModelKind::Stochastic) {
        s.sigma_x = non_negative_field(doc, "sigma_x");
        s.sigma_y = non_negative_field(doc, "sigma_y");
        const json& dist = field(doc, "distribution");
        if (!dist.is_string()) fail("scenario: field \"distribution\" must be a string");
        const std::string d = dist.get<std::string>();
        if (d == "gaussian") {
            s.distribution = NoiseDistribution::Gaussian;
        } else if (d == "uniform") {
            s.distribution = NoiseDistribution::Uniform;
        } else {
            fail("scenario: field \"distribution\" must be \"gaussian\" or \"uniform\"");
        }
        const json& seed = field(doc, "seed");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
            fail("scenario: field \"seed\" must be a non-negative integer");
        }
        s.seed = seed.get<std::uint64_t>();
        if (doc.contains("trajectories")) {
            s.trajectories = integer_field(doc, "trajectories", 2);
        }
    }
    if (s.model == ModelKind::Lanchester) {
        s.r0 = real_field(doc, "r0");
        s.g0 = real_field(doc, "g0");
        s.dt = positive_field(doc, "dt");
    }
    return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
    json doc;
    doc["model"] = std::string(to_string(s.model));
    doc["alpha"] = s.alpha;
    doc["beta"] = s.beta;
    doc["steps"] = s.steps;
    if (s.model == ModelKind::Deterministic || s.model == ModelKind::Stochastic) {
        doc["x0"] = s.x0;
        doc["x1"] = s.x1;
        doc["y0"] = s.y0;
        doc["y1"] = s.y1;
    }
    if (s.model == ModelKind::Stochastic) {
        doc["sigma_x"] = s.sigma_x;
        doc["sigma_y"] = s.sigma_y;
        doc["distribution"] =
            s.distribution == NoiseDistribution::Gaussian ? "gaussian" : "uniform";
        doc["seed"] = s.seed;
        if (s.trajectories) doc["trajectories"] = *s.trajectories;
    }
    if (s.model == ModelKind::Lanchester) {
        doc["r0"] = s.r0;
        doc["g0"] = s.g0;
        doc["dt"] = s.dt;
    }
    return doc;
}

}  // namespace sancdyn
