#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "egoscript/domain/codec.h"
#include "egoscript/domain/validation.h"
#include "egoscript/project/project.h"
#include "egoscript/service/service.h"

namespace py = pybind11;
using namespace egoscript;

namespace {

PyObject* g_error = nullptr;

Json violations_json(const Violations& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back({{"code", x.code}, {"path", x.path}, {"message", x.message}});
    return out;
}

Json optional_list(const std::vector<std::optional<double>>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) out.push_back(x ? Json(*x) : Json(nullptr));
    return out;
}

Trace trace_from(const std::string& trace_json) {
    auto t = parse_trace(Json::parse(trace_json));
    if (!t) throw ValidationError("invalid trace", t.violations());
    return std::move(t).value();
}

ScriptContract first_script(const std::string& yaml) {
    auto scripts = scripts_from_yaml(yaml);
    if (!scripts) throw ValidationError("invalid script", scripts.violations());
    if (scripts.value().empty()) throw InputError("script document holds no script");
    return scripts.value().front();
}

std::vector<VideoScore> scores_from(const std::string& scores_json) {
    std::vector<VideoScore> out;
    for (const auto& j : Json::parse(scores_json)) {
        auto s = decode_video_score(j);
        if (!s) throw ValidationError("invalid video score", s.violations());
        out.push_back(std::move(s).value());
    }
    return out;
}

ProjectConfig config_from(const std::optional<std::string>& yaml) {
    return yaml ? load_config_text(*yaml) : ProjectConfig{};
}

}  // namespace

// =============================================================================
// Module
// =============================================================================

PYBIND11_MODULE(_core, m) {
    m.doc() = "Egocentric assistance script pipeline and evaluation core";

    g_error = PyErr_NewException("egoscript._core.Error", PyExc_RuntimeError, nullptr);
    m.attr("Error") = py::handle(g_error);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(g_error, error_to_json(e).dump().c_str());
        } catch (const Json::exception& e) {
            PyErr_SetString(g_error, error_to_json(e).dump().c_str());
        }
    });

    // ---- fusion scalars ------------------------------------------------------
    m.def("latency_score",
          [](std::optional<double> dt, double tau_lo, double tau_hi, double rho_early, double rho_late) {
              const ToleranceWindow w{tau_lo, tau_hi, rho_early, rho_late};
              if (auto v = validate_window(w); !v.empty()) throw ValidationError("invalid window", v);
              return latency_score(dt, w);
          },
          py::arg("delta_t"), py::arg("tau_lo"), py::arg("tau_hi"), py::arg("rho_early") = 5.0,
          py::arg("rho_late") = 10.0);
    m.def("safety_criticality", &safety_criticality, py::arg("urgency"), py::arg("escalation_stat"));
    m.def("overall_score",
          [](double s_h, double s_t, double s_lat, double s_sc, double s_obs, bool over_alert) {
              return overall_score(s_h, s_t, s_lat, s_sc, s_obs, over_alert);
          },
          py::arg("s_h"), py::arg("s_t"), py::arg("s_lat"), py::arg("s_sc"), py::arg("s_obs"),
          py::arg("over_alert") = false);
    m.def("apply_gate",
          [](std::optional<double> alignment, double threshold) {
              const auto g = apply_gate(alignment, threshold);
              return py::make_tuple(std::string(to_string(g.status)), g.reason);
          },
          py::arg("alignment_score"), py::arg("threshold") = 0.5);
    m.def("fpr", [](int fp, int tn) { return fpr({fp, tn}); }, py::arg("fp"), py::arg("tn"));

    // ---- JSON-string bridge ----------------------------------------------------
    m.def("_compute_signals",
          [](const std::string& trace_json, int smoothing_window, const std::string& aggregator) {
              SignalConfig cfg;
              cfg.smoothing_window = smoothing_window;
              if (aggregator == "mean") {
                  cfg.aggregator = SafetyAggregator::Mean;
              } else if (aggregator != "max") {
                  throw InputError("aggregator must be max or mean");
              }
              const auto trace = trace_from(trace_json);
              const auto s = compute_signals(trace, cfg);
              return Json{{"distances", optional_list(s.distances)},
                          {"smoothed_areas", s.smoothed_areas},
                          {"growth", optional_list(s.growth)},
                          {"escalation", s.escalation},
                          {"safety_stat", s.safety_stat}}
                  .dump();
          });
    m.def("_validate_script_yaml", [](const std::string& yaml) {
        auto scripts = scripts_from_yaml(yaml);
        if (!scripts) return violations_json(scripts.violations()).dump();
        Violations all;
        for (const auto& s : scripts.value()) {
            if (auto c = validate_script(s); !c) all.insert(all.end(), c.violations().begin(), c.violations().end());
        }
        return violations_json(all).dump();
    });
    m.def("_evaluate_from_fixtures",
          [](const std::string& script_yaml, const std::string& vlm_raw, const std::string& judge_raw,
             std::optional<double> alignment, const std::string& hazard_category,
             const std::optional<std::string>& trace_json, const std::optional<std::string>& config_yaml) {
              const auto script = first_script(script_yaml);
              const auto cfg = config_from(config_yaml);
              VideoRecord record;
              record.id = video_record_id(script);
              record.script_ref = script.seed_id;
              record.duration_s = script.total_duration_s();
              record.status = VideoStatus::Rendered;
              record.alignment_score = alignment;
              Trace trace;
              if (trace_json) trace = trace_from(*trace_json);
              return to_json(evaluate_from_fixtures(script, record, trace, vlm_raw, judge_raw, hazard_category,
                                                    cfg.fusion))
                  .dump();
          });
    m.def("_export_report", [](const std::string& scores_json, const std::string& format) {
        const auto f = parse_export_format(format);
        if (!f) throw InputError("unknown format " + format);
        const auto scores = scores_from(scores_json);
        return export_report(build_report(scores), *f);
    });
    m.def("_run_pipeline",
          [](const std::string& project_dir, const std::string& scenario_json,
             const std::optional<std::string>& config_yaml) {
              auto scenario = decode<ScenarioSpec>(Json::parse(scenario_json), "scenario");
              if (!scenario) throw ValidationError("invalid scenario", scenario.violations());
              py::gil_scoped_release release;
              ArtifactStore store(project_dir);
              if (!store.has_scenario()) store.save_scenario(scenario.value());
              Project project(project_dir, config_from(config_yaml));
              const auto s = project.run_pipeline();
              return Json{{"executed_steps", s.executed_steps}, {"retry_log", s.retry_log.counts}}.dump();
          });
    m.def("_step_artifact", [](const std::string& project_dir, int step) {
        return Project(project_dir, ProjectConfig{}).step_artifact(step).dump();
    });
    m.def("_schema_document", [] { return schema_document().dump(); });
}
