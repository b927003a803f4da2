#include "service.hpp"

#include <filesystem>
#include <iostream>

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

namespace intentgrasp::app {
namespace {

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>intentgrasp</title></head>
<body><h1>intentgrasp service</h1>
<p>No UI assets are installed. The JSON API lives under <code>/api</code>:
<code>GET /api/health</code>, <code>GET /api/models</code>,
<code>POST /api/models/{name}/intent</code>, <code>POST /api/models/{name}/plan</code>,
<code>GET /api/models/{name}/ambiguity</code>, <code>POST /api/models/fit</code>.</p>
</body></html>
)";

}  // namespace

int run_http_server(Service& service, const std::string& listen, const std::string& static_dir) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "error: --listen expects host:port, got '" << listen << "'\n";
    return 2;
  }
  const std::string host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port <= 0 || port > 65535) {
    std::cerr << "error: invalid port in '" << listen << "'\n";
    return 2;
  }

  httplib::Server server;
  const auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = service.handle({req.method, req.path, req.body});
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);

  const bool has_assets = !static_dir.empty() && std::filesystem::is_directory(static_dir);
  if (has_assets) {
    server.set_mount_point("/", static_dir);
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
    });
  }

  std::cerr << "intentgrasp service listening on http://" << host << ":" << port
            << (has_assets ? " (UI from " + static_dir + ")" : std::string(" (no UI assets)")) << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << listen << "\n";
    return 3;
  }
  return 0;
}

}  // namespace intentgrasp::app
