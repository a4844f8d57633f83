#include "egoscript/service/service.h"

#include <httplib.h>

#include <fmt/format.h>

#include "egoscript/domain/codec.h"

namespace egoscript {

namespace fs = std::filesystem;

namespace {

Json violations_json(const Violations& v) {
    Json arr = Json::array();
    for (const auto& x : v) arr.push_back({{"code", x.code}, {"path", x.path}, {"message", x.message}});
    return arr;
}

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("request body is not JSON: ") + e.what());
    }
}

int step_number(const httplib::Request& req) { return std::stoi(req.matches[2].str()); }

}  // namespace

// =============================================================================
// Errors
// =============================================================================

Json error_to_json(const std::exception& e) {
    Json err{{"message", e.what()}};
    if (const auto* x = dynamic_cast<const Error*>(&e)) {
        err["code"] = x->code();
    } else if (dynamic_cast<const Json::exception*>(&e)) {
        err["code"] = "input_error";
    } else {
        err["code"] = "internal_error";
    }
    if (const auto* x = dynamic_cast<const ValidationError*>(&e)) err["violations"] = violations_json(x->violations());
    if (const auto* x = dynamic_cast<const StepFailure*>(&e)) {
        err["step"] = x->step();
        err["violations"] = violations_json(x->last_violations());
    }
    if (const auto* x = dynamic_cast<const TransportError*>(&e)) err["attempts"] = x->attempts();
    return Json{{"error", err}};
}

int http_status_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return 422;
    if (dynamic_cast<const OrderError*>(&e)) return 409;
    if (dynamic_cast<const NotFoundError*>(&e)) return 404;
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const Json::exception*>(&e)) return 400;
    if (dynamic_cast<const IntegrityError*>(&e) || dynamic_cast<const StepFailure*>(&e)) return 502;
    if (dynamic_cast<const TimeoutError*>(&e)) return 504;
    if (dynamic_cast<const TransportError*>(&e)) return 502;
    return 500;
}

// =============================================================================
// Service
// =============================================================================

Service::Service(fs::path projects_root, ProjectConfig cfg, std::shared_ptr<Gateway> gateway)
    : projects_root_(std::move(projects_root)),
      cfg_(std::move(cfg)),
      gateway_(gateway ? std::move(gateway) : std::make_shared<Gateway>(cfg_.backends)),
      server_(std::make_unique<httplib::Server>()) {
    audit_weights(cfg_.fusion.weights);
    fs::create_directories(projects_root_);
    routes();
}

Service::~Service() = default;

int Service::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    if (!server_->bind_to_port(host, port)) throw ConfigError(fmt::format("cannot bind {}:{}", host, port));
    return port;
}

void Service::serve() { server_->listen_after_bind(); }

void Service::stop() { server_->stop(); }

Project Service::project(const std::string& id) const {
    if (!Project::exists(projects_root_, id)) throw NotFoundError("no project " + id);
    return Project(projects_root_ / id, cfg_, gateway_);
}

void Service::routes() {
    auto& s = *server_;

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            reply(res, http_status_for(e), error_to_json(e));
        } catch (...) {
            reply(res, 500, Json{{"error", {{"code", "internal_error"}, {"message", "unknown error"}}}});
        }
    });

    s.Get("/schema", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, schema_document()); });

    s.Post("/projects", [this](const httplib::Request& req, httplib::Response& res) {
        Json body = parse_body(req);
        const Json& doc = body.contains("scenario") ? body["scenario"] : body;
        auto scenario = decode<ScenarioSpec>(doc, "scenario");
        if (!scenario) throw ValidationError("invalid scenario", scenario.violations());
        reply(res, 201, {{"project_id", Project::create(projects_root_, scenario.value())}});
    });

    s.Get(R"(/projects/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const auto log = p.store().load_retry_log();
        reply(res, 200,
              {{"project_id", req.matches[1].str()},
               {"scenario", to_json(p.store().load_scenario())},
               {"completed_steps", p.store().completed_steps()},
               {"retry_log", log.counts}});
    });

    s.Post(R"(/projects/([^/]+)/run)", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const auto summary = p.run_pipeline();
        reply(res, 200, {{"executed_steps", summary.executed_steps}, {"retry_log", summary.retry_log.counts}});
    });

    s.Post(R"(/projects/([^/]+)/steps/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const int step = step_number(req);
        p.run_step(step);
        reply(res, 200, p.step_artifact(step));
    });

    s.Get(R"(/projects/([^/]+)/steps/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, project(req.matches[1]).step_artifact(step_number(req)));
    });

    s.Put(R"(/projects/([^/]+)/steps/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const int step = step_number(req);
        p.replace_step(step, parse_body(req));
        reply(res, 200, p.step_artifact(step));
    });

    s.Post(R"(/projects/([^/]+)/generate)", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const Json body = parse_body(req);
        if (!body.contains("seed_id") || !body["seed_id"].is_string()) throw InputError("body needs a seed_id");
        reply(res, 200, to_json(p.generate(body["seed_id"].get<std::string>())));
    });

    s.Get(R"(/projects/([^/]+)/videos)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto records = project(req.matches[1]).videos().list();
        reply(res, 200, to_json_list<VideoRecord>(records));
    });

    s.Post(R"(/projects/([^/]+)/evaluate)", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const Json body = parse_body(req);
        if (!body.contains("video_id") || !body["video_id"].is_string()) throw InputError("body needs a video_id");
        std::optional<Trace> trace;
        if (body.contains("trace") && !body["trace"].is_null()) {
            auto t = parse_trace(body["trace"]);
            if (!t) throw ValidationError("invalid trace", t.violations());
            trace = std::move(t).value();
        }
        reply(res, 200, to_json(p.evaluate(body["video_id"].get<std::string>(), trace)));
    });

    s.Get(R"(/projects/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const auto fmt_name = req.has_param("format") ? req.get_param_value("format") : std::string("json");
        const auto format = parse_export_format(fmt_name);
        if (!format) throw InputError("unknown report format " + fmt_name);
        const auto report = p.report();
        p.write_reports(report);
        const auto doc = export_report(report, *format);
        res.status = 200;
        res.set_content(doc, *format == ExportFormat::Json  ? "application/json"
                             : *format == ExportFormat::Csv ? "text/csv"
                                                            : "text/plain");
    });

    s.Get(R"(/projects/([^/]+)/media/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto p = project(req.matches[1]);
        const auto handle = req.matches[2].str();
        if (!is_well_formed_handle(handle) || handle.find("..") != std::string::npos) {
            throw InputError("malformed media handle");
        }
        const auto path = p.root() / "media" / (handle + ".json");
        if (!fs::exists(path)) throw NotFoundError("no media " + handle);
        res.set_content(read_text_file(path), "application/json");
    });
}

}  // namespace egoscript
