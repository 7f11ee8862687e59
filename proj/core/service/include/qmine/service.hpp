#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "qmine/miner.hpp"

namespace qmine {

struct ServiceConfig {
  /// Datasets a client may open by name.
  std::map<std::string, std::filesystem::path> datasets;
  std::chrono::milliseconds query_timeout{60'000};
  std::size_t materialize_budget = 2'000'000;
  unsigned threads = 1;
};

/// HTTP/JSON front end to mining sessions:
///   POST   /sessions              {dataset, strategy, floorSupport, defaultConfidence} -> 201 {id}
///   POST   /sessions/{id}/queries {query} -> 200 {rules, stats}
///   GET    /sessions/{id}/stats   -> 200 {history, cacheSize, phiSetsDisjuncts}
///   DELETE /sessions/{id}         -> 204
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Blocks serving requests until stop().
  bool listen(const std::string& host, int port);
  /// Serves from a background thread; returns the bound port (port 0 picks one).
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One rule as a JSON object: body, head, support, confidence (6-digit string).
std::string rule_json(const AssociationRule& rule);

}  // namespace qmine
