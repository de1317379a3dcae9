#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "learnrk/butcher.hpp"
#include "learnrk/design.hpp"
#include "learnrk/learnability.hpp"
#include "learnrk/trainer.hpp"
#include "learnrk/version.hpp"

namespace learnrk {

using Json = nlohmann::ordered_json;

inline Json complex_to_json(Complex v) { return Json{{"re", v.real()}, {"im", v.imag()}}; }

inline Complex complex_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw ParseError("expected an object with re and im fields");
    }
    return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

inline Json optional_to_json(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

inline Json coefficients_to_json(const Coefficients& c) {
    Json j;
    j["l_alpha"] = optional_to_json(c.l_alpha);
    j["l_real"] = optional_to_json(c.l_real);
    j["l_imag"] = optional_to_json(c.l_imag);
    j["mu"] = c.mu ? complex_to_json(*c.mu) : Json(nullptr);
    return j;
}

inline Json result_to_json(const LearnabilityResult& r) {
    Json roots = Json::array();
    for (const LearnabilityRoot& root : r.roots) {
        roots.push_back(Json{{"alpha", complex_to_json(root.alpha)},
                             {"residual", root.residual},
                             {"multiplicity", root.multiplicity}});
    }
    Json rejected = Json::array();
    for (Complex w : r.rejected) rejected.push_back(complex_to_json(w));
    Json j;
    j["formal_degree"] = r.formal_degree;
    j["deficiency"] = r.deficiency;
    j["roots"] = roots;
    j["rejected"] = rejected;
    j["selected"] = r.selected ? complex_to_json(*r.selected) : Json(nullptr);
    // With a selected root but lambda == 0 every coefficient is undefined;
    // that collapses to null plus a reason. Without a selection (policy all)
    // there is nothing to report and the reason is omitted.
    if (!r.selected) {
        j["coefficients"] = nullptr;
    } else if (!r.coeffs.l_alpha && !r.coeffs.l_real && !r.coeffs.l_imag && !r.coeffs.mu) {
        j["coefficients"] = nullptr;
        j["coefficients_reason"] = "undefined";
    } else {
        j["coefficients"] = coefficients_to_json(r.coeffs);
    }
    return j;
}

inline Json optimizer_to_json(const OptimizerConfig& c) {
    Json j;
    j["lr"] = c.lr;
    j["epochs"] = c.epochs;
    j["batch"] = c.batch;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["eps"] = c.eps;
    j["grad_tol"] = c.grad_tol;
    return j;
}

inline Json report_to_json(const TrainingReport& r) {
    Json j;
    j["model"] = r.model;
    j["method"] = r.method;
    j["final_loss"] = r.final_loss;
    j["estimated_alpha"] = complex_to_json(r.estimated_alpha);
    j["ratio_mean"] = complex_to_json(r.ratio_mean);
    j["ratio_dispersion"] = r.ratio_dispersion;
    j["nearest_root"] = complex_to_json(r.nearest_root);
    j["distance"] = r.distance;
    j["iterations"] = r.iterations;
    j["seed"] = r.seed;
    j["optimizer"] = optimizer_to_json(r.optimizer);
    j["loss_history"] = r.loss_history;
    return j;
}

inline Json comparison_to_json(const ComparisonReport& c) {
    Json distances = Json::array();
    for (double d : c.root_distances) distances.push_back(d);
    Json j;
    j["root_distances"] = distances;
    j["matched_index"] = c.matched_index;
    j["theory"] = coefficients_to_json(c.theory);
    j["empirical"] = coefficients_to_json(c.empirical);
    return j;
}

inline Json scheme_to_json(const DesignedScheme& s) {
    Json coeffs = Json::array();
    for (int k = 0; k <= s.stability_poly.degree(); ++k) {
        coeffs.push_back(rational_to_string(s.stability_poly.coefficient(k)));
    }
    Json j;
    j["stages"] = s.stages;
    j["coefficients"] = coeffs;
    j["tableau"] = s.realized_tableau ? serialize_tableau(*s.realized_tableau)
                                      : nlohmann::json(nullptr);
    j["tolerance"] = s.tol;
    j["reach"] = s.reach;
    return j;
}

struct RunManifest {
    std::string command;
    Json config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    double wall_time_seconds = 0.0;
};

inline Json manifest_to_json(const RunManifest& m) {
    Json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
    j["tool_version"] = LEARNRK_VERSION;
    j["outputs"] = m.outputs;
    j["wall_time_seconds"] = m.wall_time_seconds;
    return j;
}

}  // namespace learnrk
