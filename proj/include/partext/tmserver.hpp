// Copyright 2026 The partext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "partext/lingstore.hpp"

namespace partext {

struct ServerOptions {
  /// Tables, submissions and sessions live here and survive restarts:
  ///
  ///   tables/<name>/            saved linguistic tables
  ///   documents/<id>.json       submissions (segmentation and id lists)
  ///   sessions/<id>.json        CAT session state
  ///   sessions/<id>.med         the dossier a session was opened from
  ///   sessions/<id>.result.med  the dossier returned on completion
  std::filesystem::path data_dir;
  /// Table used when a request names none. Created empty if missing.
  std::string database = "db";
  /// Minimum similarity of the suggestions listed with session segments.
  double suggestion_threshold = 0.6;
  std::size_t threads = 8;
};

/// Translation-memory HTTP service.
///
/// Documents are submitted once and answered with a URI; the server keeps
/// only the matched record ids and builds the translation memory in the
/// requested languages and format when the URI is fetched. CAT sessions
/// open a dossier, track per-segment drafts and confirmations, and on
/// completion write the new version back into the dossier and harvest the
/// confirmed pairs into the database.
///
/// Endpoints (JSON for metadata, errors as {"error", "message"}):
///
///   POST /documents?lang=&threshold=&markup=plain|marked&table=
///   GET  /documents/{id}?langs=a,b&format=tmx|csv
///   GET  /documents/{id}/matches
///   GET  /tables
///   GET  /tables/{name}?langs=&format=tmx|csv
///   PUT  /tables/{name}?format=tmx|csv
///   GET  /tables/{name}/records/{rN}
///   POST /sessions?target=&source=&table=        body: dossier archive
///   GET  /sessions?active=true
///   GET  /sessions/{id}
///   GET  /sessions/{id}/segments
///   GET  /sessions/{id}/segments/{n}
///   PUT  /sessions/{id}/segments/{n}             {"text","state","accepted"}
///   GET  /sessions/{id}/peer/{lang}
///   POST /sessions/{id}/complete                 returns the dossier archive
class TmServer {
 public:
  /// Loads whatever `options.data_dir` already holds. Throws Io.
  explicit TmServer(ServerOptions options);
  ~TmServer();
  TmServer(const TmServer&) = delete;
  TmServer& operator=(const TmServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Io on failure.
  int bind(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving requests until stop().
  void listen();
  /// bind() and listen() on a background thread; returns once accepting.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  std::shared_ptr<LinguisticTable> table(const std::string& name) const;
  std::shared_ptr<LinguisticTable> database() const;
  /// Registers (or replaces) a table under its name and saves it.
  void put_table(LinguisticTable table);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace partext
