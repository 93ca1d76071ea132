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

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lingstore_internal.hpp"
#include "partext/error.hpp"
#include "partext/lingstore.hpp"

namespace partext {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kShardSize = 10000;
constexpr std::string_view kFormat = "partext-table";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes next to the target and renames, so readers never see half a file.
void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string shard_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "shard-%05zu.csv", index);
  return buf;
}

}  // namespace

void save_table(const LinguisticTable& table, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + directory.string() + ": " + ec.message());

  // One consistent snapshot for all shards.
  const LinguisticTable snapshot(table);
  const auto records = snapshot.records();
  const auto langs_set = snapshot.languages();
  const std::vector<LanguageTag> langs(langs_set.begin(), langs_set.end());

  nlohmann::json manifest;
  manifest["format"] = kFormat;
  manifest["version"] = 1;
  manifest["name"] = snapshot.name();
  manifest["records"] = records.size();
  manifest["languages"] = nlohmann::json::array();
  for (const auto& l : langs) manifest["languages"].push_back(l.code());
  manifest["shards"] = nlohmann::json::array();

  std::set<std::string> written;
  for (std::size_t start = 0, index = 0; start < records.size() || index == 0; start += kShardSize, ++index) {
    const auto end = std::min(records.size(), start + kShardSize);
    std::vector<LinguisticRecord> chunk(records.begin() + static_cast<std::ptrdiff_t>(start),
                                        records.begin() + static_cast<std::ptrdiff_t>(end));
    const auto name = shard_name(index);
    write_file_atomic(directory / name, detail::write_table_csv(chunk, langs, true));
    manifest["shards"].push_back(name);
    written.insert(name);
    if (end >= records.size()) break;
  }
  write_file_atomic(directory / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& entry : fs::directory_iterator(directory)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("shard-") && name.ends_with(".csv") && !written.contains(name)) fs::remove(entry.path(), ec);
  }
}

LinguisticTable load_table(const fs::path& directory) {
  const auto manifest_path = directory / "manifest.json";
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::Io, "no table manifest in " + directory.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, "unreadable manifest " + manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("format", "") != kFormat) {
    throw Error(ErrorCode::Io, manifest_path.string() + " is not a table manifest");
  }
  LinguisticTable table(manifest.value("name", "table"));
  for (const auto& shard : manifest.at("shards")) {
    detail::read_table_csv(read_file(directory / shard.get<std::string>()), std::nullopt, table);
  }
  if (manifest.contains("records") && manifest["records"].get<std::size_t>() != table.size()) {
    throw Error(ErrorCode::Io, "table in " + directory.string() + " lost records");
  }
  return table;
}

}  // namespace partext
