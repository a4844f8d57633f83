#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "egoscript/project/project.h"

namespace httplib {
class Server;
}

namespace egoscript {

/// Machine-readable error body: {"error": {"code", "message", "violations"?,
/// "step"?, "attempts"?}}.
Json error_to_json(const std::exception& e);

/// HTTP status for an exception raised by a library call.
int http_status_for(const std::exception& e);

/// Field-level description of every artifact the service accepts or returns.
/// Enumerations list their closed vocabularies so forms cannot drift from the
/// validators.
Json schema_document();

/// HTTP adapter over Project. Every handler forwards to one library call and
/// serializes its result.
///
///   POST /projects                         {scenario}          -> {project_id}
///   GET  /projects/{id}                                        -> status
///   POST /projects/{id}/run                                    -> run summary
///   POST /projects/{id}/steps/{n}                              -> artifact
///   GET  /projects/{id}/steps/{n}                              -> artifact
///   PUT  /projects/{id}/steps/{n}          {artifact}          -> artifact
///   POST /projects/{id}/generate           {seed_id}           -> VideoRecord
///   GET  /projects/{id}/videos                                 -> [VideoRecord]
///   POST /projects/{id}/evaluate           {video_id, trace?}  -> VideoScore
///   GET  /projects/{id}/report[?format=json|csv|text]          -> report
///   GET  /projects/{id}/media/{handle}                         -> media sidecar
///   GET  /schema                                               -> schema document
class Service {
public:
    Service(std::filesystem::path projects_root, ProjectConfig cfg, std::shared_ptr<Gateway> gateway = nullptr);
    ~Service();

    httplib::Server& server() { return *server_; }

    /// Binds to `port` (0 picks a free port) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks serving requests on the bound socket until stop().
    void serve();
    void stop();

    Project project(const std::string& id) const;

private:
    void routes();

    std::filesystem::path projects_root_;
    ProjectConfig cfg_;
    std::shared_ptr<Gateway> gateway_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace egoscript
