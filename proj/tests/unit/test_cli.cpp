#include <doctest.h>

#include <sstream>

#include "alp/cli.hpp"
#include "alp/dc_metadata.hpp"
#include "alp/json_codec.hpp"
#include "alp/util.hpp"
#include "support/fixtures.hpp"

using namespace alp;
using namespace alp::cli;
using nlohmann::json;

namespace {

const Getenv no_env = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run alp_run(std::vector<std::string> args) {
  args.insert(args.begin(), "alp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err, no_env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void add_library(const std::filesystem::path& root, const std::string& slug) {
  StoreWriter w(root);
  w.put_library(alp::testing::library(slug, "Artist " + slug, Provenance::MaterialFonds));
}

// Blanks the title of the given data row (0-based) in CSV text.
std::string without_title(const std::string& csv, std::size_t row) {
  std::string out;
  const auto rows = dc::read_csv(csv);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto fields = rows[i].fields;
    if (i == row + 1) fields[1] = "";
    out += dc::csv_line(fields);
  }
  return out;
}

std::vector<std::unique_ptr<providers::ProviderClient>> replay_clients() {
  ProviderSettings s;
  s.fixtures_dir = alp::testing::fixture_path("providers");
  s.sru_endpoint = "https://gallica.example/SRU";
  s.enabled = {"gallica_like"};
  s.rate_per_second = 1000;
  return make_clients(s, [](std::chrono::milliseconds) {});
}

// The batch cases as records of a "batch" library, ids in case order.
json load_batch_store(const std::filesystem::path& root, bool with_timeout_record) {
  const auto batch = json::parse(read_file(alp::testing::fixture_path("matcher/batch_input.json")));
  add_library(root, "batch");
  std::vector<BibRecord> recs;
  int n = 0;
  for (const auto& c : batch["cases"]) {
    std::vector<DcElement> els;
    for (const char* f : {"title", "creator", "date", "publisher"}) {
      if (c["record"].contains(f)) els.push_back(alp::testing::el(f, c["record"][f]));
    }
    recs.push_back(alp::testing::make_record(assign_id("batch", n++), els));
  }
  if (with_timeout_record) {
    recs.push_back(alp::testing::make_record(assign_id("batch", n++), {alp::testing::el("title", "Timeout")}));
  }
  StoreWriter(root).write("batch", recs);
  return batch;
}

}  // namespace

TEST_CASE("ingest: accepted rows get sequential ids") {
  alp::testing::TempDir dir;
  add_library(dir.path(), "monet");
  StoreWriter w(dir.path());
  const auto s = ingest_csv(w, alp::testing::synthetic_csv("monet", 12, 7), dir.path() / "report.csv");
  CHECK(s.rows == 12);
  CHECK(s.accepted == 12);
  CHECK(s.rejected == 0);
  REQUIRE(s.record_ids.size() == 12);
  CHECK(s.record_ids.front() == "monet-000001");
  CHECK(s.record_ids.back() == "monet-000012");
  CHECK(read_file(dir.path() / "report.csv") == "line,reason\n");
  CHECK(w.read("monet").size() == 12);

  const auto again = ingest_csv(w, alp::testing::synthetic_csv("monet", 3, 8), dir.path() / "report.csv");
  CHECK(again.record_ids == std::vector<std::string>{"monet-000013", "monet-000014", "monet-000015"});
}

TEST_CASE("ingest: a row without title is rejected and reported by line") {
  alp::testing::TempDir dir;
  add_library(dir.path(), "monet");
  StoreWriter w(dir.path());
  const auto csv = without_title(alp::testing::synthetic_csv("monet", 12, 7), 4);
  const auto s = ingest_csv(w, csv, dir.path() / "report.csv");
  CHECK(s.rows == 12);
  CHECK(s.accepted == 11);
  CHECK(s.rejected == 1);
  const auto report = dc::read_csv(read_file(dir.path() / "report.csv"));
  REQUIRE(report.size() == 2);
  CHECK(report[1].fields[0] == "6");
  CHECK(report[1].fields[1].find("title") != std::string::npos);
  // Rejected rows consume no sequence number.
  CHECK(s.record_ids.back() == "monet-000011");
}

TEST_CASE("ingest: unknown libraries and header problems") {
  alp::testing::TempDir dir;
  add_library(dir.path(), "monet");
  StoreWriter w(dir.path());
  const std::string csv = std::string("library_slug,title,creator,date,publisher,language,shelf_mark,subjects,marks,rights\n") +
                          "rodin,Un titre,,,,,,,,\n" + "monet,Un autre,,1880,,,,,,\n";
  const auto s = ingest_csv(w, csv, dir.path() / "r.csv");
  CHECK(s.accepted == 1);
  CHECK(s.rejected == 1);
  CHECK(read_file(dir.path() / "r.csv").find("2,unknown library") != std::string::npos);
  CHECK_THROWS_AS(ingest_csv(w, "title,creator\nx,y\n", dir.path() / "r.csv"), dc::IngestHeaderError);
}

TEST_CASE("match: batch verdicts agree with the reference scorer") {
  alp::testing::TempDir dir;
  const auto batch = load_batch_store(dir.path(), false);
  const auto expected = json::parse(read_file(alp::testing::fixture_path("matcher/batch_expected.json")));
  const auto clients = replay_clients();
  std::ostringstream csv;
  {
    StoreWriter w(dir.path());
    const auto s = match_library(w, "batch", clients, 20, csv);
    CHECK(s.records == 5);
    CHECK(s.exact == 2);
    CHECK(s.approximate == 2);
    CHECK(s.no_match == 1);
    CHECK(s.provider_errors == 0);
    CHECK(s.attached == 4);
  }
  const auto rows = dc::read_csv(csv.str());
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].fields.size() == 9);
  const auto stored = store_read(dir.path(), "batch");
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& exp = expected["cases"][i];
    CAPTURE(exp["name"].get<std::string>());
    const auto& f = rows[i + 1].fields;
    CHECK(f[0] == assign_id("batch", static_cast<long long>(i)));
    CHECK(f[8] == exp["verdict"].get<std::string>());
    if (exp["chosen"].is_null()) {
      CHECK(stored[i].surrogates.empty());
    } else {
      CHECK(f[2] == exp["chosen"]["id"].get<std::string>());
      REQUIRE(stored[i].surrogates.size() == 1);
      CHECK(stored[i].surrogates[0].provider_record_id == exp["chosen"]["id"].get<std::string>());
      CHECK(to_string(stored[i].surrogates[0].match_level) == exp["verdict"].get<std::string>());
    }
  }

  // A second run leaves matched records alone.
  std::ostringstream csv2;
  StoreWriter w(dir.path());
  const auto again = match_library(w, "batch", clients, 20, csv2);
  CHECK(again.skipped == 4);
  CHECK(again.attached == 0);
  CHECK(again.no_match == 1);
  CHECK(store_read(dir.path(), "batch") == stored);
}

TEST_CASE("match: a timing-out provider does not stop the batch") {
  alp::testing::TempDir dir;
  load_batch_store(dir.path(), true);
  std::ostringstream csv;
  StoreWriter w(dir.path());
  const auto s = match_library(w, "batch", replay_clients(), 20, csv);
  CHECK(s.records == 6);
  CHECK(s.provider_errors == 1);
  CHECK(s.exact + s.approximate + s.no_match == 5);
  const auto rows = dc::read_csv(csv.str());
  REQUIRE(rows.size() == 7);
  CHECK(rows[6].fields[0] == "batch-000006");
  CHECK(rows[6].fields[1] == "gallica_like");
  CHECK(rows[6].fields[8] == "provider_error");
  CHECK(w.read("batch")[5].surrogates.empty());
  CHECK_THROWS_AS(match_library(w, "rodin", replay_clients(), 20, csv), NotFoundError);
}

TEST_CASE("client wiring") {
  ProviderSettings s;
  CHECK(make_clients(s).size() == 2);
  s.enabled = {"fixture"};
  CHECK_THROWS_AS(make_clients(s), ConfigError);
  alp::testing::TempDir dir;
  write_file_atomic(dir.path() / "c.json",
                    R"([{"id": "x1", "title": "Salammbô", "creator": "Flaubert, Gustave", "date": "1863",
                        "url": "https://example.org/x1"}])");
  s.static_candidates = dir.path() / "c.json";
  const auto clients = make_clients(s);
  REQUIRE(clients.size() == 1);
  const auto found = clients[0]->search(providers::ProviderQuery{"Salammbô", std::nullopt, std::nullopt, 20});
  REQUIRE(found.size() == 1);
  CHECK(found[0].provider_record_id == "x1");
  CHECK_FALSE(found[0].publisher);
}

TEST_CASE("command line: exit codes") {
  alp::testing::TempDir dir;
  const std::string store = (dir.path() / "store").string();
  CHECK(alp_run({"--store", store, "library", "add", "monet", "--artist", "Claude Monet", "--provenance",
                 "material_fonds"})
            .code == kExitOk);
  CHECK(alp_run({"--store", store, "library", "add", "x", "--artist", "X", "--provenance", "oral"}).code ==
        kExitFatal);

  const auto csv = dir.path() / "in.csv";
  write_file_atomic(csv, alp::testing::synthetic_csv("monet", 12, 3));
  auto r = alp_run({"--store", store, "ingest", csv.string(), "--report", (dir.path() / "rep.csv").string()});
  CHECK(r.code == kExitOk);
  CHECK(json::parse(r.out)["accepted"] == 12);

  write_file_atomic(csv, without_title(alp::testing::synthetic_csv("monet", 12, 4), 0));
  r = alp_run({"--store", store, "ingest", csv.string()});
  CHECK(r.code == kExitPartial);
  CHECK(read_file(csv.string() + ".report.csv").find("\n2,") != std::string::npos);

  write_file_atomic(csv, "title\nx\n");
  CHECK(alp_run({"--store", store, "ingest", csv.string()}).code == kExitFatal);
  CHECK(alp_run({"--store", store, "ingest", (dir.path() / "nope.csv").string()}).code == kExitFatal);
  CHECK(alp_run({"--store", store, "frobnicate"}).code == kExitFatal);
  CHECK(alp_run({"--store", store}).code == kExitFatal);
  CHECK(alp_run({"--help"}).code == kExitOk);

  CHECK(alp_run({"--store", store, "index"}).code == kExitOk);
  r = alp_run({"--store", store, "search", "--json", "--limit", "5", "a"});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("stale") == std::string::npos);
  CHECK(json::parse(r.out)["schema_version"] == 1);
  r = alp_run({"--store", store, "search", "--mode", "advanced", "title:("});
  CHECK(r.code == kExitFatal);
  CHECK(r.err.find("at byte 6") != std::string::npos);

  CHECK(alp_run({"--store", store, "geo", "set", "monet", "--lat", "49.07", "--lon", "1.53"}).code == kExitOk);
  CHECK(alp_run({"--store", store, "geo", "set", "monet", "--lat", "99", "--lon", "1.53"}).code == kExitFatal);
  CHECK(alp_run({"--store", store, "geo", "set", "rodin", "--lat", "9", "--lon", "1"}).code == kExitFatal);

  const auto photo = dir.path() / "p.jpg";
  write_file_atomic(photo, "JPEG");
  r = alp_run({"--store", store, "asset", "register", "monet-000001", "--kind", "dedication_photo", "--rights",
               "in_copyright", "--original", photo.string()});
  CHECK(r.code == kExitFatal);  // needs a derivative
  r = alp_run({"--store", store, "asset", "register", "monet-000001", "--kind", "dedication_photo", "--rights",
               "in_copyright", "--original", photo.string(), "--derivative", photo.string()});
  CHECK(r.code == kExitOk);
  CHECK(json::parse(r.out)["asset_id"] == "monet-000001-a1");

  CHECK(alp_run({"--store", store, "validate"}).code == kExitOk);
  write_file_atomic(csv, alp::testing::synthetic_csv("monet", 2, 5));
  CHECK(alp_run({"--store", store, "validate", "--csv", csv.string()}).code == kExitOk);

  {
    WriterLock held(store);
    r = alp_run({"--store", store, "ingest", csv.string()});
    CHECK(r.code == kExitFatal);
    CHECK(r.err.find("lock") != std::string::npos);
  }
  CHECK(alp_run({"--store", store, "ingest", csv.string()}).code == kExitOk);
}

TEST_CASE("command line: a corrupt store is reported, not served") {
  alp::testing::TempDir dir;
  alp::testing::write_fixture_store(dir.path());
  const auto file = dir.path() / "collections" / "monet" / "records.jsonl";
  REQUIRE(std::filesystem::exists(file));
  write_file_atomic(file, read_file(file) + "{not json\n");
  auto r = alp_run({"--store", dir.path().string(), "validate"});
  CHECK(r.code == kExitPartial);
  CHECK(r.out.find(":8") != std::string::npos);
  r = alp_run({"--store", dir.path().string(), "serve", "--port", "0"});
  CHECK(r.code == kExitFatal);
  CHECK(r.err.find("does not validate") != std::string::npos);
  CHECK(alp_run({"--store", dir.path().string(), "search", "x"}).code == kExitFatal);
}

TEST_CASE("command line: config file and environment") {
  alp::testing::TempDir dir;
  write_file_atomic(dir.path() / "alp.json", R"({"store_root": "s"})");
  const auto conf = (dir.path() / "alp.json").string();
  CHECK(alp_run({"--config", conf, "library", "add", "monet", "--artist", "M", "--provenance", "inventory"}).code ==
        kExitOk);
  CHECK(std::filesystem::exists(dir.path() / "s" / "libraries.json"));
  write_file_atomic(dir.path() / "bad.json", R"({"sotre_root": "s"})");
  const auto bad = alp_run({"--config", (dir.path() / "bad.json").string(), "validate"});
  CHECK(bad.code == kExitFatal);
  CHECK(bad.err.find("sotre_root") != std::string::npos);
}
