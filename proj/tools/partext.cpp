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

// partext command-line driver. Exit status: 0 success, 1 operation error
// (or lint/label findings), 2 usage error. Findings go to standard error
// unless --porcelain asks for tab-separated records on standard output.

#include <CLI11.hpp>
#include <cstdlib>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "partext/error.hpp"
#include "partext/gentext.hpp"
#include "partext/medbox.hpp"
#include "partext/tmserver.hpp"
#include "partext/utf8.hpp"

namespace fs = std::filesystem;
using namespace partext;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, std::string_view data) {
  if (path.empty() || path == "-") {
    std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
}

/// Tabs, newlines and backslashes escaped so one record stays on one line.
std::string field(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

/// A bare name with no directory part resolves under $PARTEXT_DATA_DIR/tables.
fs::path table_dir(const std::string& arg) {
  const fs::path p(arg);
  const char* data = std::getenv("PARTEXT_DATA_DIR");
  if (data && *data && !p.has_parent_path() && !fs::exists(p)) return fs::path(data) / "tables" / p;
  return p;
}

std::string table_name(const fs::path& dir) {
  auto name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  return name.empty() ? "table" : name;
}

std::set<LanguageTag> languages(const std::string& raw) {
  auto list = parse_tag_list(raw);
  return {list.begin(), list.end()};
}

SegmentKind kind_of(const std::string& raw) {
  auto k = parse_segment_kind(raw);
  if (!k) throw Usage("unknown segment level '" + raw + "'");
  return *k;
}

SegmentedText read_text(const std::string& data, const std::string& format, const LanguageTag& lang,
                        SegmentKind level) {
  if (format == "plain") return segment_text(data, lang, {}, level);
  if (format == "html") return segment_html(data, lang, {}, level);
  if (format == "xml") return segment_marked(data);
  if (format == "marked") return parse_marked_text(data, lang);
  if (format == "json") return deserialize_segmentation(data);
  throw Usage("unknown input format '" + format + "'");
}

struct Options {
  bool porcelain = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partext: segmentation, alignment, translation memories, generation and dossiers"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--porcelain", opt.porcelain, "Tab-separated machine-readable output");
  std::function<int()> action;

  // segment
  auto* seg = app.add_subcommand("segment", "Segment a text and print its segmentation");
  std::string seg_in = "-", seg_lang, seg_level = "sentence", seg_format = "plain", seg_out, seg_marked;
  seg->add_option("input", seg_in, "Input file, '-' for standard input");
  seg->add_option("--lang,-l", seg_lang, "Language of the text")->required();
  seg->add_option("--level", seg_level, "file, paragraph, sentence or subsentence");
  seg->add_option("--format,-f", seg_format, "plain, html, xml or marked");
  seg->add_option("--marked", seg_marked, "Print marked text with this record base instead of JSON");
  seg->add_option("--output,-o", seg_out, "Output file");
  seg->callback([&] {
    action = [&] {
      const auto text = read_text(read_input(seg_in), seg_format, parse_tag(seg_lang), kind_of(seg_level));
      if (opt.porcelain) {
        std::string out;
        const auto leaves = leaf_segments(text);
        for (std::size_t k = 0; k < leaves.size(); ++k) {
          const auto& s = segment_at(text, leaves[k]);
          out += std::to_string(k) + "\t" + std::string(to_string(s.kind)) + "\t" + std::to_string(s.span.begin) +
                 "\t" + std::to_string(s.span.end) + "\t" + field(segment_content(text, s)) + "\n";
        }
        write_output(seg_out, out);
      } else if (!seg_marked.empty()) {
        write_output(seg_out, emit_marked_text(text, seg_marked));
      } else {
        write_output(seg_out, serialize_segmentation(text));
      }
      return 0;
    };
  });

  // align
  auto* al = app.add_subcommand("align", "Align linguistic versions; optionally pack them into a dossier");
  std::vector<std::string> al_inputs;
  std::string al_level = "sentence", al_format = "plain", al_out, al_id = "aligned", al_prov;
  al->add_option("versions", al_inputs, "lang=file pairs, one per version")->required();
  al->add_option("--level", al_level, "Finest level to try");
  al->add_option("--format,-f", al_format, "Input format of every file");
  al->add_option("--provenance", al_prov, "Provenance recorded with the alignment");
  al->add_option("--dossier", al_out, "Write a dossier archive here instead of printing the groups");
  al->add_option("--id", al_id, "Dossier id");
  al->callback([&] {
    action = [&] {
      std::map<LanguageTag, SegmentedText> versions;
      for (const auto& item : al_inputs) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Usage("expected lang=file, got '" + item + "'");
        const auto lang = parse_tag(item.substr(0, eq));
        versions.insert_or_assign(lang, read_text(read_input(item.substr(eq + 1)), al_format, lang, kind_of(al_level)));
      }
      const auto pt = align(versions, kind_of(al_level), al_prov);
      if (!al_out.empty()) {
        std::vector<LanguageTag> langs;
        for (const auto& [l, v] : versions) langs.push_back(l);
        auto med = make_dossier(al_id, al_id, langs);
        med.parallel = pt;
        write_output(al_out, pack(med));
        return 0;
      }
      std::string out;
      if (!opt.porcelain) out += "granularity: " + to_string(pt.granularity) + "\n";
      for (std::size_t k = 0; k < pt.groups.size(); ++k) {
        const auto& g = pt.groups[k];
        if (opt.porcelain) {
          out += std::to_string(k) + "\t" + std::string(to_string(g.kind));
          for (const auto& [lang, path] : g.members) out += "\t" + lang.code() + "\t" + field(member_text(pt, g, lang));
          out += "\n";
        } else {
          out += "group " + std::to_string(k + 1) + " (" + std::string(to_string(g.kind)) + ")\n";
          for (const auto& [lang, path] : g.members) out += "  " + lang.code() + ": " + field(member_text(pt, g, lang)) + "\n";
        }
      }
      write_output("", out);
      return 0;
    };
  });

  // harvest
  auto* hv = app.add_subcommand("harvest", "Harvest a dossier's aligned segments into a table");
  std::string hv_in, hv_table;
  hv->add_option("dossier", hv_in, "Dossier archive")->required();
  hv->add_option("--table,-t", hv_table, "Table directory (created when missing)")->required();
  hv->callback([&] {
    action = [&] {
      const auto med = unpack(read_input(hv_in));
      const auto dir = table_dir(hv_table);
      auto table = fs::exists(dir / "manifest.json") ? load_table(dir) : LinguisticTable(table_name(dir));
      const auto added = harvest(med.parallel, table);
      save_table(table, dir);
      write_output("", opt.porcelain ? std::to_string(added) + "\t" + std::to_string(table.size()) + "\n"
                                     : std::to_string(added) + " new records, " + std::to_string(table.size()) +
                                           " in total\n");
      return 0;
    };
  });

  // tmx / csv
  auto add_exchange = [&](const std::string& name, bool tmx) {
    auto* cmd = app.add_subcommand(name, tmx ? "TMX interchange" : "CSV interchange");
    cmd->require_subcommand(1);
    auto* ex = cmd->add_subcommand("export", "Export a table");
    auto* im = cmd->add_subcommand("import", "Import into a table directory, replacing it");
    auto table = std::make_shared<std::string>();
    auto langs = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto in = std::make_shared<std::string>("-");
    auto tname = std::make_shared<std::string>();
    ex->add_option("--table,-t", *table, "Table directory")->required();
    ex->add_option("--langs", *langs, "Comma-separated languages (default: all)");
    ex->add_option("--output,-o", *out, "Output file");
    im->add_option("input", *in, "Input file, '-' for standard input");
    im->add_option("--table,-t", *table, "Table directory")->required();
    im->add_option("--name", *tname, "Table name (default: the one recorded in the file, else the directory name)");
    ex->callback([&, tmx, table, langs, out] {
      action = [&, tmx, table, langs, out] {
        const auto t = load_table(table_dir(*table));
        const auto l = languages(*langs);
        write_output(*out, tmx ? export_tmx(t, l) : export_csv(t, l));
        return 0;
      };
    });
    im->callback([&, tmx, table, in, tname] {
      action = [&, tmx, table, in, tname] {
        const auto data = read_input(*in);
        auto t = tmx ? import_tmx(data) : import_csv(data);
        const auto dir = table_dir(*table);
        if (!tname->empty()) {
          t.set_name(*tname);
        } else if (t.name().empty()) {
          t.set_name(table_name(dir));
        }
        save_table(t, dir);
        write_output("", opt.porcelain ? std::to_string(t.size()) + "\n"
                                       : std::to_string(t.size()) + " records imported\n");
        return 0;
      };
    });
  };
  add_exchange("tmx", true);
  add_exchange("csv", false);

  // generate
  auto* gen = app.add_subcommand("generate", "Fill a template from linguistic tables");
  std::string gen_tpl, gen_lang, gen_langs, gen_out, gen_marked;
  std::vector<std::string> gen_tables;
  gen->add_option("--template", gen_tpl, "Template file")->required();
  gen->add_option("--table,-t", gen_tables, "Table directory; repeat for several tables")->required();
  auto* one = gen->add_option("--lang,-l", gen_lang, "Generate this version as text");
  auto* all = gen->add_option("--langs", gen_langs, "Generate these versions into a dossier (needs --output)");
  one->excludes(all);
  gen->add_option("--marked", gen_marked, "Print marked text with this record base instead of plain text");
  gen->add_option("--output,-o", gen_out, "Output file");
  gen->callback([&] {
    if (gen_lang.empty() == gen_langs.empty()) throw CLI::ValidationError("generate", "give exactly one of --lang, --langs");
    if (!gen_langs.empty() && gen_out.empty()) throw CLI::ValidationError("generate", "--langs needs --output");
    action = [&] {
      const auto tmpl = parse_template(read_input(gen_tpl), fs::path(gen_tpl).stem().string());
      TableRegistry registry;
      std::map<std::string, fs::path> dirs;
      for (const auto& arg : gen_tables) {
        const auto dir = table_dir(arg);
        auto t = std::make_shared<LinguisticTable>(load_table(dir));
        dirs[t->name()] = dir;
        registry[t->name()] = std::move(t);
      }
      auto save = [&] {
        for (const auto& [name, t] : registry) save_table(*t, dirs.at(name));
      };
      if (!gen_lang.empty()) {
        const auto text = registry.size() == 1 ? generate(tmpl, *registry.begin()->second, parse_tag(gen_lang))
                                               : generate(tmpl, registry, parse_tag(gen_lang));
        save();
        write_output(gen_out, gen_marked.empty() ? text.source() : emit_marked_text(text, gen_marked));
        return 0;
      }
      std::vector<GenerationFailure> failures;
      const auto set = languages(gen_langs);
      const auto pt = registry.size() == 1 ? generate_all(tmpl, *registry.begin()->second, set, &failures)
                                           : generate_all(tmpl, registry, set, &failures);
      save();
      std::vector<LanguageTag> langs(set.begin(), set.end());
      auto med = make_dossier(tmpl.name, tmpl.name, langs);
      med.parallel = pt;
      write_output(gen_out, pack(med));
      for (const auto& f : failures) {
        std::cerr << "missing: " << record_uri(f.base, f.id) << " in " << f.language.code() << "\n";
      }
      return 0;
    };
  });

  // med
  auto* med = app.add_subcommand("med", "Multilingual electronic dossiers");
  med->require_subcommand(1);
  auto* mpack = med->add_subcommand("pack", "Pack a dossier directory into an archive");
  auto* munpack = med->add_subcommand("unpack", "Unpack an archive into a directory");
  auto* mvalidate = med->add_subcommand("validate", "Check a dossier archive or directory");
  auto* mindex = med->add_subcommand("index", "Generate the main index of a dossier");
  std::string m_in, m_out;
  mpack->add_option("directory", m_in, "Dossier directory")->required();
  mpack->add_option("--output,-o", m_out, "Archive to write")->required();
  munpack->add_option("archive", m_in, "Dossier archive")->required();
  munpack->add_option("--output,-o", m_out, "Directory to write")->required();
  mvalidate->add_option("dossier", m_in, "Archive or directory")->required();
  mindex->add_option("archive", m_in, "Dossier archive")->required();
  mindex->add_option("--output,-o", m_out, "Output file");
  mpack->callback([&] {
    action = [&] {
      write_output(m_out, pack(unpack_members(read_directory(m_in))));
      return 0;
    };
  });
  munpack->callback([&] {
    action = [&] {
      const auto bytes = read_input(m_in);
      (void)unpack(bytes);
      write_directory(zip::read(bytes), m_out);
      return 0;
    };
  });
  mvalidate->callback([&] {
    action = [&] {
      const auto diags = fs::is_directory(m_in) ? validate_directory(m_in) : validate(read_input(m_in));
      std::string out;
      bool errors = false;
      for (const auto& d : diags) {
        errors = errors || d.severity == Severity::error;
        if (opt.porcelain) {
          out += std::string(to_string(d.severity)) + "\t" + d.code + "\t" + field(d.member) + "\t" + field(d.message) + "\n";
        } else {
          out += std::string(to_string(d.severity)) + ": " + d.code + (d.member.empty() ? "" : " [" + d.member + "]") +
                 ": " + d.message + "\n";
        }
      }
      if (opt.porcelain) {
        write_output("", out);
      } else {
        std::cerr << out;
      }
      return errors ? 1 : 0;
    };
  });
  mindex->callback([&] {
    action = [&] {
      write_output(m_out, generate_index(unpack(read_input(m_in))));
      return 0;
    };
  });

  // langcheck
  auto* lc = app.add_subcommand("langcheck", "Check language labels, or a file against its declared labels");
  std::vector<std::string> lc_codes;
  std::string lc_file, lc_declared, lc_format = "plain", lc_lang = "un";
  lc->add_option("codes", lc_codes, "Labels to classify");
  lc->add_option("--file", lc_file, "File whose content is compared with --declared");
  lc->add_option("--declared", lc_declared, "Comma-separated declared labels");
  lc->add_option("--format,-f", lc_format, "plain, html, xml or marked");
  lc->add_option("--lang", lc_lang, "Language the file is read as");
  lc->callback([&] {
    if (lc_codes.empty() == lc_file.empty()) throw CLI::ValidationError("langcheck", "give labels or --file, not both");
    if (!lc_file.empty() && lc_declared.empty()) throw CLI::ValidationError("langcheck", "--file needs --declared");
    action = [&] {
      std::string out;
      int status = 0;
      if (!lc_codes.empty()) {
        for (const auto& raw : lc_codes) {
          try {
            const auto tag = parse_tag(raw);
            const auto name = language_name(tag);
            out += opt.porcelain ? raw + "\t" + tag.code() + "\t" + std::string(to_string(tag.kind())) + "\t" + std::string(name) + "\n"
                                 : raw + ": " + tag.code() + " (" + std::string(to_string(tag.kind())) +
                                       (name.empty() ? "" : ", " + std::string(name)) + ")\n";
          } catch (const Error& e) {
            status = 1;
            if (opt.porcelain) {
              out += raw + "\t\t" + std::string(to_string(e.code())) + "\t" + field(e.what()) + "\n";
            } else {
              std::cerr << raw << ": " << to_string(e.code()) << ": " << e.what() << "\n";
            }
          }
        }
        write_output("", out);
        return status;
      }
      const auto text = read_text(read_input(lc_file), lc_format, parse_tag(lc_lang), SegmentKind::paragraph);
      FileLanguageMetadata meta;
      for (const auto& t : parse_tag_list(lc_declared)) {
        if (std::find(meta.declared.begin(), meta.declared.end(), t) == meta.declared.end()) meta.declared.push_back(t);
      }
      for (const auto& d : check_labelling(meta, observed_languages(text))) {
        const char* issue = d.issue == LabellingIssue::undeclared_language   ? "undeclared-language"
                            : d.issue == LabellingIssue::declared_but_absent ? "declared-but-absent"
                                                                             : "ml-misuse";
        if (opt.porcelain) {
          out += std::string(issue) + "\t" + d.language.code() + "\t" + field(d.message) + "\n";
        } else {
          std::cerr << issue << " " << d.language.code() << ": " << d.message << "\n";
        }
        status = 1;
      }
      write_output("", out);
      return status;
    };
  });

  // serve
  auto* sv = app.add_subcommand("serve", "Run the translation-memory HTTP server");
  int sv_port = 8080;
  std::string sv_host = "127.0.0.1", sv_data, sv_db = "db";
  sv->add_option("--port,-p", sv_port, "TCP port (0 picks a free one)");
  sv->add_option("--host", sv_host, "Address to bind");
  sv->add_option("--data-dir", sv_data, "State directory (default: $PARTEXT_DATA_DIR)");
  sv->add_option("--database", sv_db, "Default table");
  sv->callback([&] {
    if (sv_data.empty()) {
      const char* env = std::getenv("PARTEXT_DATA_DIR");
      if (!env || !*env) throw CLI::ValidationError("serve", "set --data-dir or PARTEXT_DATA_DIR");
      sv_data = env;
    }
    action = [&] {
      ServerOptions options;
      options.data_dir = sv_data;
      options.database = sv_db;
      static TmServer* running = nullptr;
      TmServer server(options);
      running = &server;
      const int port = server.bind(sv_host, sv_port);
      std::signal(SIGINT, [](int) { if (running) running->stop(); });
      std::signal(SIGTERM, [](int) { if (running) running->stop(); });
      std::cerr << "listening on http://" << sv_host << ":" << port << "\n";
      if (opt.porcelain) std::cout << port << std::endl;
      server.listen();
      running = nullptr;
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
