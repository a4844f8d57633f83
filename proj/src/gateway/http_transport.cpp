#include <chrono>
#include <regex>

#include <fmt/format.h>
#include <httplib.h>

#include "egoscript/gateway/stub_backend.h"

namespace egoscript {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string base_path;
};

Endpoint split_url(const std::string& url) {
    static const std::regex kUrl(R"((https?://[^/]+)(/.*)?)", std::regex::icase);
    std::smatch m;
    if (!std::regex_match(url, m, kUrl)) throw ConfigError("malformed endpoint url '" + url + "'");
    std::string path = m[2].matched ? m[2].str() : std::string();
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {m[1].str(), path};
}

}  // namespace

std::string HttpTransport::send(const BackendConfig& cfg,
                                const std::optional<std::string>& credential,
                                std::string_view operation, const Json& body) {
    const auto ep = split_url(cfg.endpoint_url);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(cfg.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (credential) headers.emplace("Authorization", "Bearer " + *credential);

    const Json request{{"model", cfg.model_name}, {"kind", to_string(cfg.kind)}, {"input", body}};
    const auto path = fmt::format("{}/{}", ep.base_path, operation);
    auto res = client.Post(path, headers, request.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        const auto what = fmt::format("{} {}: {}", ep.origin, path, httplib::to_string(err));
        if (err == httplib::Error::Read || err == httplib::Error::Write ||
            err == httplib::Error::ConnectionTimeout) {
            throw TimeoutError(what);
        }
        throw TransportError(what);
    }
    if (res->status >= 400 && res->status < 500 && res->status != 408 && res->status != 429) {
        throw InputError(fmt::format("{} rejected the request ({}): {}", path, res->status, res->body));
    }
    if (res->status != 200) {
        throw TransportError(fmt::format("{} returned HTTP {}", path, res->status));
    }
    auto reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("output")) {
        throw TransportError(path + " reply lacks an 'output' member");
    }
    const auto& output = reply["output"];
    return output.is_string() ? output.get<std::string>() : output.dump();
}

}  // namespace egoscript
