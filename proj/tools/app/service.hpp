#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "engine.hpp"

namespace intentgrasp::app {

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Named immutable models. Readers take a snapshot and never wait for a fit;
/// publishing swaps in a new snapshot with the version bumped.
class ModelRegistry {
 public:
  struct Snapshot {
    std::uint64_t version = 0;
    std::map<std::string, std::shared_ptr<const ModelEntry>> entries;
  };

  ModelRegistry();

  std::shared_ptr<const Snapshot> snapshot() const;

  /// Returns the new registry version; throws DuplicateModel when taken.
  std::uint64_t publish(ModelEntry entry);

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> current_;
};

class DuplicateModel : public std::runtime_error {
 public:
  explicit DuplicateModel(const std::string& name) : std::runtime_error("model '" + name + "' already exists") {}
};

struct ServiceLimits {
  std::size_t max_iterations = 50'000;
  std::chrono::milliseconds plan_timeout{30'000};
  /// Whether POST /api/models/fit may read datasets from server-side paths.
  bool allow_dataset_paths = true;
};

/// Transport-independent request handling for the HTTP API.
class Service {
 public:
  explicit Service(ServiceLimits limits = {});

  ModelRegistry& registry() noexcept { return registry_; }
  const ServiceLimits& limits() const noexcept { return limits_; }

  /// Publishes cup7, cup5, cup4 and flashlight7.
  void load_builtin_models();

  HttpResponse handle(const HttpRequest& request) const;

 private:
  HttpResponse health() const;
  HttpResponse list_models() const;
  HttpResponse intent(const ModelEntry& entry, const Json& body) const;
  HttpResponse plan(const ModelEntry& entry, const Json& body) const;
  HttpResponse ambiguity(const ModelEntry& entry) const;
  HttpResponse fit(const Json& body) const;

  mutable ModelRegistry registry_;
  ServiceLimits limits_;
};

/// Blocks serving `service` on host:port. Files under `static_dir` are served
/// at "/" when the directory exists.
int run_http_server(Service& service, const std::string& listen, const std::string& static_dir);

}  // namespace intentgrasp::app
