#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "egoscript/domain/codec.h"
#include "egoscript/project/project.h"
#include "egoscript/service/service.h"

namespace fs = std::filesystem;
using namespace egoscript;

namespace {

Service* g_service = nullptr;

ProjectConfig config_from(const std::string& path) {
    return path.empty() ? ProjectConfig{} : load_config(path);
}

Json read_document(const std::string& path) {
    if (!fs::exists(path)) throw InputError("file not found: " + path);
    return yaml_text_to_json(read_text_file(path));
}

ScenarioSpec read_scenario(const std::string& path) {
    auto s = decode<ScenarioSpec>(read_document(path), "scenario");
    if (!s) throw ValidationError("invalid scenario file " + path, s.violations());
    return std::move(s).value();
}

Trace read_trace(const std::string& path) {
    if (!fs::exists(path)) throw InputError("file not found: " + path);
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError(fmt::format("trace {} is not JSON: {}", path, e.what()));
    }
    auto t = parse_trace(j);
    if (!t) throw ValidationError("invalid trace " + path, t.violations());
    return std::move(t).value();
}

/// Opens the project at `path`, creating it from `scenario_path` when needed.
Project open_project(const std::string& path, const std::string& scenario_path, const ProjectConfig& cfg) {
    ArtifactStore store(path);
    if (!scenario_path.empty()) {
        const auto scenario = read_scenario(scenario_path);
        if (!store.has_scenario()) {
            store.save_scenario(scenario);
        } else if (store.load_scenario() != scenario) {
            throw IntegrityError("project " + path + " holds a different scenario");
        }
    } else if (!store.has_scenario()) {
        throw InputError("project " + path + " has no scenario.json; pass --scenario");
    }
    return Project(path, cfg);
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

int exit_code_for(const std::exception& e) {
    switch (http_status_for(e)) {
        case 400:
        case 422: return 2;
        case 404: return 3;
        case 409: return 4;
        case 502:
        case 504: return 5;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario generation, synthesis and evaluation for egocentric assistance"};
    app.require_subcommand(1);

    std::string project, config, scenario, video, trace, format = "json";
    int step = 0;

    auto* run = app.add_subcommand("run", "Run every missing pipeline step");
    run->add_option("--project", project, "Project directory")->required();
    run->add_option("--config", config, "Config YAML");
    run->add_option("--scenario", scenario, "Scenario YAML/JSON (required for a new project)");

    auto* stepc = app.add_subcommand("step", "Run a single pipeline step");
    stepc->add_option("--project", project, "Project directory")->required();
    stepc->add_option("--config", config, "Config YAML");
    stepc->add_option("--scenario", scenario, "Scenario YAML/JSON (required for a new project)");
    stepc->add_option("--step", step, "Step number")->required()->check(CLI::Range(1, 5));

    auto* gen = app.add_subcommand("generate", "Synthesize the video for one seed");
    std::string seed;
    gen->add_option("--project", project, "Project directory")->required();
    gen->add_option("--config", config, "Config YAML");
    gen->add_option("--seed", seed, "Seed id")->required();

    auto* eval = app.add_subcommand("evaluate", "Score one video (live backends or fixture files)");
    std::string script_file, vlm_file, judge_file, hazard_category;
    std::optional<double> alignment;
    eval->add_option("--project", project, "Project directory");
    eval->add_option("--config", config, "Config YAML");
    eval->add_option("--video", video, "Video record id");
    eval->add_option("--trace", trace, "Segmentation trace JSON");
    eval->add_option("--script", script_file, "Fixture mode: script YAML");
    eval->add_option("--vlm", vlm_file, "Fixture mode: raw VLM analysis payload");
    eval->add_option("--judge", judge_file, "Fixture mode: raw judge payload");
    eval->add_option("--alignment", alignment, "Fixture mode: alignment score");
    eval->add_option("--hazard-category", hazard_category, "Fixture mode: scenario hazard category");

    auto* rep = app.add_subcommand("report", "Aggregate a project's analysis files");
    rep->add_option("--project", project, "Project directory")->required();
    rep->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));

    auto* cmp = app.add_subcommand("compare", "Compare two report.json files");
    std::string report_a, report_b, label_a = "A", label_b = "B";
    cmp->add_option("a", report_a, "First report.json")->required();
    cmp->add_option("b", report_b, "Second report.json")->required();
    cmp->add_option("--label-a", label_a);
    cmp->add_option("--label-b", label_b);
    cmp->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));

    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    std::string projects_root = "projects", host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--projects", projects_root, "Directory holding project directories");
    serve->add_option("--config", config, "Config YAML");
    serve->add_option("--host", host);
    serve->add_option("--port", port);

    app.add_subcommand("schema", "Print the artifact schema document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << Json{{"error", {{"code", "usage_error"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }

    try {
        if (*run) {
            auto p = open_project(project, scenario, config_from(config));
            const auto s = p.run_pipeline();
            print({{"project", project}, {"executed_steps", s.executed_steps}, {"retry_log", s.retry_log.counts}});
        } else if (*stepc) {
            auto p = open_project(project, scenario, config_from(config));
            p.run_step(step);
            print(p.step_artifact(step));
        } else if (*gen) {
            auto p = open_project(project, "", config_from(config));
            print(to_json(p.generate(seed)));
        } else if (*eval) {
            const auto cfg = config_from(config);
            std::optional<Trace> frames;
            if (!trace.empty()) frames = read_trace(trace);
            const bool fixture = !vlm_file.empty() || !judge_file.empty() || !script_file.empty();
            if (fixture) {
                if (vlm_file.empty() || judge_file.empty() || script_file.empty()) {
                    throw InputError("fixture mode needs --script, --vlm and --judge");
                }
                auto scripts = scripts_from_yaml(read_text_file(script_file));
                if (!scripts) throw ValidationError("invalid script " + script_file, scripts.violations());
                if (scripts.value().empty()) throw InputError("script file holds no script");
                const auto& script = scripts.value().front();
                VideoRecord record;
                record.id = video.empty() ? video_record_id(script) : video;
                record.script_ref = script.seed_id;
                record.duration_s = script.total_duration_s();
                record.status = VideoStatus::Rendered;
                record.alignment_score = alignment;
                const std::span<const FrameObservation> span =
                    frames ? std::span<const FrameObservation>(*frames) : std::span<const FrameObservation>();
                auto score = evaluate_from_fixtures(script, record, span, read_text_file(vlm_file),
                                                    read_text_file(judge_file), hazard_category, cfg.fusion);
                if (!project.empty()) Project(project, cfg).save_score(score);
                print(to_json(score));
            } else {
                if (project.empty() || video.empty()) throw InputError("evaluate needs --project and --video");
                auto p = open_project(project, "", cfg);
                print(to_json(p.evaluate(video, frames)));
            }
        } else if (*rep) {
            Project p(project, ProjectConfig{});
            const auto report = p.report();
            p.write_reports(report);
            std::cout << export_report(report, *parse_export_format(format));
        } else if (*cmp) {
            const auto a = import_report_json(read_text_file(report_a));
            const auto b = import_report_json(read_text_file(report_b));
            std::cout << export_comparison(compare_runs(a.rows, b.rows, label_a, label_b),
                                           *parse_export_format(format));
        } else if (*serve) {
            Service service(projects_root, config_from(config));
            g_service = &service;
            std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
            std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
            const int bound = service.bind(host, port);
            std::cerr << fmt::format("listening on http://{}:{}\n", host, bound);
            service.serve();
            g_service = nullptr;
        } else {
            print(schema_document());
        }
    } catch (const std::exception& e) {
        std::cerr << error_to_json(e).dump() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
