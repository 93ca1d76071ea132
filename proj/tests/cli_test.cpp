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

#include <fcntl.h>
#include <gtest/gtest.h>
#include <httplib.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "partext/gentext.hpp"
#include "partext/medbox.hpp"
#include "support/random_med.hpp"
#include "support/random_text.hpp"

namespace fs = std::filesystem;
using namespace partext;

namespace {

const LanguageTag kEn = parse_tag("en");
const LanguageTag kEs = parse_tag("es");

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string drain(int fd) {
  std::string data;
  char buf[4096];
  for (ssize_t n; (n = ::read(fd, buf, sizeof buf)) > 0;) data.append(buf, static_cast<std::size_t>(n));
  ::close(fd);
  return data;
}

pid_t spawn(const std::vector<std::string>& args, int& out_fd, int& err_fd, const std::string& stdin_path = {},
            const std::map<std::string, std::string>& env = {}) {
  int out[2], err[2];
  if (::pipe(out) != 0 || ::pipe(err) != 0) throw std::runtime_error("pipe");
  const pid_t pid = ::fork();
  if (pid == 0) {
    ::dup2(out[1], 1);
    ::dup2(err[1], 2);
    ::close(out[0]);
    ::close(err[0]);
    if (!stdin_path.empty()) {
      const int in = ::open(stdin_path.c_str(), O_RDONLY);
      ::dup2(in, 0);
    }
    for (const auto& [k, v] : env) ::setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> argv;
    std::string exe = PARTEXT_CLI;
    argv.push_back(exe.data());
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    ::execv(exe.c_str(), argv.data());
    ::_exit(127);
  }
  ::close(out[1]);
  ::close(err[1]);
  out_fd = out[0];
  err_fd = err[0];
  return pid;
}

Run run(const std::vector<std::string>& args, const std::string& stdin_path = {},
        const std::map<std::string, std::string>& env = {}) {
  int out_fd, err_fd;
  const pid_t pid = spawn(args, out_fd, err_fd, stdin_path, env);
  Run r;
  std::thread err_reader([&] { r.err = drain(err_fd); });
  r.out = drain(out_fd);
  err_reader.join();
  int status = 0;
  ::waitpid(pid, &status, 0);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

LinguisticTable reference_table(std::string name = "db") {
  LinguisticTable t(std::move(name));
  auto add = [&](std::string en, std::string es) {
    LinguisticRecord r;
    r.segments = {{kEn, std::move(en)}, {kEs, std::move(es)}};
    t.insert(r);
  };
  add("hello world", "Hola mundo");
  add("white cat", "gato blanco");
  add("white cat", "gata blanca");
  return t;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("partext_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SegmentMatchesLibrary) {
  partext::testing::RandomText rt(11);
  for (int k = 0; k < 15; ++k) {
    const auto text = rt.text(600);
    spit(path("in.txt"), text);
    const auto doc = segment_text(text, kEs);
    auto r = run({"segment", "--lang", "es", path("in.txt")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, serialize_segmentation(doc));
    r = run({"segment", "-l", "es", "--marked", "db", path("in.txt")});
    EXPECT_EQ(r.out, emit_marked_text(doc, "db"));
    r = run({"segment", "-l", "es", "-", "-o", path("out.json")}, path("in.txt"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "");
    EXPECT_EQ(slurp(path("out.json")), serialize_segmentation(doc));
  }
}

TEST_F(CliTest, SegmentPorcelain) {
  spit(path("in.txt"), "Hello world. White cat.\n\nThe end.\n");
  const auto r = run({"--porcelain", "segment", "-l", "en", path("in.txt")});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out,
            "0\tsentence\t0\t12\tHello world.\n"
            "1\tsentence\t13\t23\tWhite cat.\n"
            "2\tsentence\t25\t33\tThe end.\n");
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"--no-such-flag"}).status, 2);
  EXPECT_EQ(run({"segment", "--lang", "en", "--bogus", "x"}).status, 2);
  EXPECT_EQ(run({"segment", "x"}).status, 2);
  EXPECT_EQ(run({"segment", "--lang", "en", "--level", "chapter", "-"}).status, 2);
  EXPECT_EQ(run({"med"}).status, 2);
  EXPECT_EQ(run({"segment", "--lang", "en", path("missing.txt")}).status, 1);
  spit(path("in.txt"), "Hi.");
  EXPECT_EQ(run({"segment", "--lang", "e1", path("in.txt")}).status, 1);
  spit(path("bad.txt"), std::string("bad \xff byte"));
  const auto bad = run({"segment", "--lang", "en", path("bad.txt")});
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("InvalidEncoding"), std::string::npos) << bad.err;

  for (const std::vector<std::string>& help :
       {std::vector<std::string>{"--help"}, {"segment", "--help"}, {"align", "--help"}, {"harvest", "--help"},
        {"tmx", "export", "--help"}, {"tmx", "import", "--help"}, {"csv", "export", "--help"},
        {"csv", "import", "--help"}, {"generate", "--help"}, {"med", "pack", "--help"},
        {"med", "unpack", "--help"}, {"med", "validate", "--help"}, {"med", "index", "--help"},
        {"langcheck", "--help"}, {"serve", "--help"}}) {
    const auto r = run(help);
    EXPECT_EQ(r.status, 0) << help.front();
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << help.front();
  }
}

TEST_F(CliTest, Generate) {
  save_table(reference_table(), path("db"));
  spit(path("t.txt"), "{r1}");
  auto r = run({"generate", "--template", path("t.txt"), "--table", path("db"), "--lang", "es"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "Hola mundo");
  EXPECT_EQ(load_table(path("db")).find(1)->value.uses, 1u);
  r = run({"generate", "--template", path("t.txt"), "--table", path("db"), "--lang", "en", "--marked", "db"});
  EXPECT_EQ(r.out, "#base db\n<<r1|hello world>>");
  EXPECT_EQ(load_table(path("db")).find(1)->value.uses, 2u);

  spit(path("t2.txt"), "{r9}");
  r = run({"generate", "--template", path("t2.txt"), "--table", path("db"), "--lang", "es"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("UnknownRecord"), std::string::npos) << r.err;
  EXPECT_EQ(run({"generate", "--template", path("t.txt"), "--table", path("db")}).status, 2);

  r = run({"generate", "--template", path("t.txt"), "--table", "db", "--langs", "en,es", "-o", path("g.med")}, {},
          {{"PARTEXT_DATA_DIR", dir_.string() + "/data"}});
  EXPECT_EQ(r.status, 1);
  fs::create_directories(dir_ / "data" / "tables");
  fs::rename(path("db"), dir_ / "data" / "tables" / "db");
  r = run({"generate", "--template", path("t.txt"), "--table", "db", "--langs", "en,es", "-o", path("g.med")}, {},
          {{"PARTEXT_DATA_DIR", dir_.string() + "/data"}});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto med = unpack(slurp(path("g.med")));
  EXPECT_EQ(med.parallel.versions.at(kEs).source(), "Hola mundo");
  EXPECT_EQ(med.parallel.versions.at(kEn).source(), "hello world");
}

TEST_F(CliTest, TmxAndCsvRoundTrip) {
  const auto table = reference_table();
  save_table(table, path("db"));
  auto r = run({"tmx", "export", "--table", path("db")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, export_tmx(table));
  spit(path("db.tmx"), r.out);
  r = run({"tmx", "import", path("db.tmx"), "--table", path("copy")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(export_tmx(load_table(path("copy"))), export_tmx(table));

  r = run({"csv", "export", "--table", path("db"), "--langs", "es"});
  EXPECT_EQ(r.out, export_csv(table, {kEs}));
  r = run({"csv", "export", "--table", path("db"), "-o", path("db.csv")});
  EXPECT_EQ(r.status, 0);
  r = run({"csv", "import", "--table", path("copy2"), "-"}, path("db.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(export_csv(load_table(path("copy2"))), export_csv(table));

  spit(path("junk.tmx"), "<tmx");
  EXPECT_EQ(run({"tmx", "import", path("junk.tmx"), "--table", path("copy3")}).status, 1);
  EXPECT_FALSE(fs::exists(path("copy3")));
}

TEST_F(CliTest, AlignAndHarvest) {
  spit(path("en.txt"), "Hello world. White cat.\n\nThe end.\n");
  spit(path("es.txt"), "Hola mundo. Gato blanco.\n\nFin.\n");
  std::map<LanguageTag, SegmentedText> versions{{kEn, segment_text(slurp(path("en.txt")), kEn)},
                                                {kEs, segment_text(slurp(path("es.txt")), kEs)}};
  const auto pt = align(versions, SegmentKind::sentence);
  auto r = run({"--porcelain", "align", "en=" + path("en.txt"), "es=" + path("es.txt")});
  ASSERT_EQ(r.status, 0) << r.err;
  std::string expected;
  for (std::size_t k = 0; k < pt.groups.size(); ++k) {
    expected += std::to_string(k) + "\t" + std::string(to_string(pt.groups[k].kind));
    for (const auto& [lang, p] : pt.groups[k].members) expected += "\t" + lang.code() + "\t" + member_text(pt, pt.groups[k], lang);
    expected += "\n";
  }
  EXPECT_EQ(r.out, expected);

  r = run({"align", "en=" + path("en.txt"), "es=" + path("es.txt"), "--dossier", path("a.med"), "--id", "pair"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto med = unpack(slurp(path("a.med")));
  EXPECT_EQ(med.header.at("id"), "pair");
  EXPECT_EQ(med.parallel, pt);

  r = run({"--porcelain", "harvest", path("a.med"), "--table", path("tm")});
  ASSERT_EQ(r.status, 0) << r.err;
  LinguisticTable local("tm");
  const auto added = harvest(pt, local);
  EXPECT_EQ(r.out, std::to_string(added) + "\t" + std::to_string(local.size()) + "\n");
  EXPECT_EQ(export_tmx(load_table(path("tm"))), export_tmx(local));
  r = run({"--porcelain", "harvest", path("a.med"), "--table", path("tm")});
  EXPECT_EQ(r.out, "0\t" + std::to_string(local.size()) + "\n");
  EXPECT_EQ(run({"align", "en" + path("en.txt")}).status, 2);
}

TEST_F(CliTest, MedCommands) {
  partext::testing::RandomText rt(5);
  for (int k = 0; k < 10; ++k) {
    const auto med = partext::testing::random_dossier(rt);
    const auto archive = pack(med);
    spit(path("d.med"), archive);
    auto r = run({"med", "validate", path("d.med")});
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "");
    EXPECT_EQ(r.err, "");

    fs::remove_all(path("unpacked"));
    r = run({"med", "unpack", path("d.med"), "-o", path("unpacked")});
    ASSERT_EQ(r.status, 0) << r.err;
    r = run({"med", "pack", path("unpacked"), "-o", path("again.med")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(slurp(path("again.med")), archive);
    EXPECT_EQ(run({"med", "validate", path("unpacked")}).out, "");

    r = run({"med", "index", path("d.med")});
    EXPECT_EQ(r.out, generate_index(med));
  }
  spit(path("junk.med"), "not a zip");
  auto r = run({"--porcelain", "med", "validate", path("junk.med")});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.out.substr(0, 17), "error\tnot-a-zip\t\t");
  r = run({"med", "validate", path("junk.med")});
  EXPECT_EQ(r.out, "");
  EXPECT_EQ(r.err.substr(0, 17), "error: not-a-zip:");
  EXPECT_EQ(run({"med", "unpack", path("junk.med"), "-o", path("x")}).status, 1);
}

TEST_F(CliTest, ValidateFixtureCorpus) {
  const fs::path root = fs::path(PARTEXT_FIXTURES) / "med";
  std::size_t cases = 0;
  for (const auto& entry : fs::directory_iterator(root)) {
    const auto expected = slurp(entry.path() / "expected.txt");
    const auto r = run({"--porcelain", "med", "validate", (entry.path() / "dossier").string()});
    std::string got;
    bool errors = false;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) {
      std::istringstream fields(line);
      std::string sev, code, member;
      std::getline(fields, sev, '\t');
      std::getline(fields, code, '\t');
      std::getline(fields, member, '\t');
      errors = errors || sev == "error";
      got += sev + " " + code + " " + member + "\n";
    }
    EXPECT_EQ(got, expected) << entry.path();
    EXPECT_EQ(r.status, errors ? 1 : 0) << entry.path();
    ++cases;
  }
  EXPECT_GE(cases, 10u);
}

TEST_F(CliTest, Langcheck) {
  auto r = run({"--porcelain", "langcheck", "en", "un", "mm"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.substr(0, 6), "en\ten\t");
  r = run({"langcheck", "en", "m1"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("m1: Malformed"), std::string::npos) << r.err;
  EXPECT_EQ(r.out.find("m1"), std::string::npos);

  spit(path("m.xml"), "<doc xml:lang=\"en\"><p><s>Hello.</s> <s xml:lang=\"es\">Hola.</s></p></doc>");
  const auto doc = segment_marked(slurp(path("m.xml")));
  FileLanguageMetadata meta;
  meta.declared = {kEn};
  const auto diags = check_labelling(meta, observed_languages(doc));
  ASSERT_EQ(diags.size(), 1u);
  r = run({"--porcelain", "langcheck", "--file", path("m.xml"), "--format", "xml", "--declared", "en"});
  EXPECT_EQ(r.status, 1) << r.err;
  EXPECT_EQ(r.out, "undeclared-language\tes\t" + diags[0].message + "\n");
  r = run({"langcheck", "--file", path("m.xml"), "--format", "xml", "--declared", "en,es"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "");
  EXPECT_EQ(run({"langcheck", "--file", path("m.xml")}).status, 2);
}

TEST_F(CliTest, Serve) {
  save_table(reference_table(), dir_ / "data" / "tables" / "db");
  int out_fd, err_fd;
  const pid_t pid = spawn({"--porcelain", "serve", "--port", "0"}, out_fd, err_fd, {},
                          {{"PARTEXT_DATA_DIR", (dir_ / "data").string()}});
  std::string line;
  for (char c; ::read(out_fd, &c, 1) == 1 && c != '\n';) line += c;
  ASSERT_FALSE(line.empty());
  httplib::Client client("127.0.0.1", std::stoi(line));
  auto res = client.Post("/documents?lang=en", "hello world", "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  res = client.Get(res->get_header_value("Location") + "?langs=es&format=csv");
  ASSERT_TRUE(res);
  EXPECT_NE(res->body.find("Hola mundo"), std::string::npos);
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ::close(out_fd);
  ::close(err_fd);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(run({"serve"}, {}, {{"PARTEXT_DATA_DIR", ""}}).status, 2);
}
