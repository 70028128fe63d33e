#include "support/fixtures.hpp"

#include <cstdlib>

#include <json.hpp>

#include "alp/assets.hpp"
#include "alp/dc_metadata.hpp"
#include "alp/util.hpp"

namespace alp::testing {
namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "alp-test-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

DcElement el(std::string name, std::string value, std::optional<std::string> qualifier) {
  return DcElement{std::move(name), std::move(qualifier), std::move(value), std::nullopt};
}

BibRecord make_record(std::string record_id, std::vector<DcElement> elements) {
  BibRecord r;
  r.library_slug = record_slug(record_id);
  r.record_id = std::move(record_id);
  r.elements = std::move(elements);
  r.datestamp = "2019-03-01T10:00:00Z";
  return r;
}

ArtistLibrary library(std::string slug, std::string artist, Provenance provenance,
                      std::optional<double> lat, std::optional<double> lon, std::string site) {
  ArtistLibrary l;
  l.slug = std::move(slug);
  l.artist_name = std::move(artist);
  l.provenance = provenance;
  l.latitude = lat;
  l.longitude = lon;
  l.holding_site = std::move(site);
  return l;
}

std::vector<ArtistLibrary> fixture_libraries() {
  auto monet = library("monet", "Claude Monet", Provenance::MaterialFonds, 49.0753, 1.5337,
                       "Maison de Claude Monet, Giverny");
  monet.birth_year = 1840;
  monet.death_year = 1926;
  auto detaille = library("detaille", "Édouard Detaille", Provenance::Inventory, 48.8842, 2.3080,
                          "Archives Detaille, Paris");
  detaille.birth_year = 1848;
  detaille.death_year = 1912;
  auto kandinsky = library("kandinsky", "Wassily Kandinsky", Provenance::Reconstituted, 48.8606,
                           2.3522, "Bibliothèque Kandinsky");
  auto brancusi = library("brancusi", "Constantin Brancusi", Provenance::SalesCatalog, 48.8606,
                          2.3522, "Bibliothèque Kandinsky");
  auto delacroix = library("delacroix", "Eugène Delacroix", Provenance::SalesCatalog);
  return {monet, detaille, kandinsky, brancusi, delacroix};
}

std::vector<BibRecord> fixture_records() {
  std::vector<BibRecord> out;
  auto add = [&](std::string id, std::vector<DcElement> els) {
    out.push_back(make_record(std::move(id), std::move(els)));
    return &out.back();
  };
  add("monet-000001", {el("title", "Du dessin et de la couleur"), el("creator", "Bracquemond, Félix"),
                       el("date", "1885"), el("publisher", "G. Charpentier"),
                       el("language", "fre")});
  auto* quixote = add("monet-000002",
                      {el("title", "L'ingénieur Hidalgo Don Quichotte de la Manche"),
                       el("creator", "Cervantes, Miguel de"), el("contributor", "Doré, Gustave"),
                       el("date", "1869"), el("publisher", "Hachette"),
                       el("description", "Trad. Louis Viardot et 370 compositions de Gustave Doré"),
                       el("subject", "Roman espagnol -- Traductions françaises", "rameau")});
  quixote->shelf_mark = "Salon, armoire 2, rayon 3";
  quixote->marks.push_back(ReadingMark{MarkKind::Dedication, "flyleaf", "À Claude Monet", {}});
  auto* fables = add("monet-000003", {el("title", "Fables. Avec les dessins de Gustave Doré"),
                                      el("creator", "La Fontaine, Jean de"),
                                      el("contributor", "Doré, Gustave"), el("date", "1868"),
                                      el("publisher", "Hachette")});
  fables->marks.push_back(ReadingMark{MarkKind::DogEar, "p. 12", std::nullopt, {}});
  add("monet-000004", {el("title", "Les Misérables"), el("creator", "Hugo, Victor"),
                       el("date", "1862"), el("publisher", "Lacroix, Verboeckhoven")});
  add("monet-000005", {el("title", "Notre-Dame de Paris"), el("creator", "Hugo, Victor"),
                       el("date", "1831", "issued"), el("publisher", "Gosselin")});
  add("monet-000006", {el("title", "Les Contemplations"), el("creator", "Hugo, Victor"),
                       el("date", "1856")});
  add("monet-000007", {el("title", "Paul Cézanne"), el("creator", "Gasquet, Joachim"),
                       el("date", "1921"), el("publisher", "Bernheim-Jeune"),
                       el("subject", "Peinture -- France -- 19e siècle", "rameau")});
  add("detaille-000001", {el("title", "Fables. Avec les dessins de Gustave Doré"),
                          el("creator", "La Fontaine, Jean de"), el("date", "1868"),
                          el("publisher", "Hachette")});
  add("detaille-000002", {el("title", "Histoire de Napoléon"), el("creator", "Laurent de l'Ardèche, Paul-Mathieu"),
                          el("date", "1839"), el("publisher", "Dubochet")});
  add("detaille-000003", {el("title", "Souvenirs de la guerre"), el("creator", "Detaille, Édouard"),
                          el("date", "1888")});
  add("kandinsky-000001", {el("title", "Fables. Avec les dessins de Gustave Doré"),
                           el("creator", "La Fontaine, Jean de"), el("date", "1890"),
                           el("publisher", "Hachette")});
  add("kandinsky-000002", {el("title", "Über das Geistige in der Kunst"), el("creator", "Kandinsky, Wassily"),
                           el("date", "1912"), el("publisher", "Piper"), el("language", "ger")});
  return out;
}

std::shared_ptr<const Snapshot> fixture_snapshot() {
  return Snapshot::from_memory(fixture_libraries(), fixture_records());
}

void write_fixture_store(const fs::path& root) {
  StoreWriter writer(root, [] { return std::string("2019-03-01T10:00:00Z"); });
  for (const auto& l : fixture_libraries()) writer.put_library(l);
  std::map<std::string, std::vector<BibRecord>> by_lib;
  for (const auto& r : fixture_records()) by_lib[r.library_slug].push_back(r);
  for (const auto& [slug, records] : by_lib) writer.write(slug, records);
}

namespace {

const std::vector<std::string> kWords = {
    "peinture", "éducation", "jardin", "lumière", "société", "histoire", "poésie",    "mémoires",
    "étude",    "voyage",    "île",    "théâtre", "paysage",  "nature",  "rêverie",   "salon",
    "critique", "œuvres",    "lettres", "été",    "cathédrale", "fleurs", "ombres",  "siècle",
    "impressionnistes", "japon", "estampes", "réalisme", "naturalisme", "époque", "châteaux",
    "forêt",    "rivière",   "musée",  "crépuscule", "aube", "marine", "méditations", "orient",
    "légendes", "chansons",  "contes", "nouvelles", "chroniques", "souvenirs", "ateliers"};
const std::vector<std::string> kSurnames = {
    "Hugo", "Zola", "Flaubert", "Baudelaire", "Gautier", "Mallarmé", "Goncourt", "Maupassant",
    "Daudet", "Mirbeau", "Michelet", "Taine", "Sainte-Beuve", "Loti", "Verlaine", "Dumas",
    "Balzac", "Stendhal", "Musset", "Nerval", "Ruskin", "Chevreul", "Renan", "Fromentin"};
const std::vector<std::string> kGiven = {"Victor", "Émile", "Gustave", "Charles", "Théophile",
                                         "Stéphane", "Edmond", "Guy", "Alphonse", "Octave",
                                         "Jules", "Hippolyte", "Pierre", "Eugène"};
const std::vector<std::string> kPublishers = {
    "G. Charpentier", "Hachette", "Calmann Lévy", "Michel Lévy frères", "Lemerre", "Dentu",
    "Plon", "E. Fasquelle", "Flammarion", "Mercure de France", "Hetzel", "Garnier frères"};
const std::vector<std::string> kSubjects = {"Peinture -- France -- 19e siècle", "Jardins",
                                            "Art japonais -- Influence", "Roman français",
                                            "Poésie française -- 19e siècle", "Voyages -- Italie"};

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

std::string capitalize_first(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

std::vector<SyntheticRow> synthetic_rows(std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_int_distribution<int> year(1800, 1925);
  std::vector<SyntheticRow> rows;
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticRow row;
    const int n = len(rng);
    for (int w = 0; w < n; ++w) {
      if (w) row.title += (w == 1 && n > 2) ? " et " : " ";
      row.title += w == 0 ? capitalize_first(pick(rng, kWords)) : pick(rng, kWords);
    }
    row.creator = pick(rng, kSurnames) + ", " + pick(rng, kGiven);
    row.date = std::to_string(year(rng));
    row.publisher = pick(rng, kPublishers);
    row.subject = pick(rng, kSubjects);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BibRecord> synthetic_records(const std::string& slug, std::size_t count, unsigned seed) {
  std::vector<BibRecord> out;
  const auto rows = synthetic_rows(count, seed);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    out.push_back(make_record(assign_id(slug, static_cast<long long>(i)),
                              {el("title", row.title), el("creator", row.creator),
                               el("date", row.date), el("publisher", row.publisher),
                               el("subject", row.subject, "rameau")}));
  }
  return out;
}

std::string synthetic_csv(const std::string& slug, std::size_t count, unsigned seed) {
  std::string csv = "library_slug,title,creator,date,publisher,language,shelf_mark,subjects,marks,rights\n";
  for (const auto& row : synthetic_rows(count, seed)) {
    csv += dc::csv_line({slug, row.title, row.creator, row.date, row.publisher, "fre", "", row.subject,
                         "", "public_domain"});
  }
  return csv;
}

std::filesystem::path fixture_path(std::string_view relative) {
  return std::filesystem::path(ALP_FIXTURE_DIR) / relative;
}

std::filesystem::path schema_path(std::string_view relative) {
  return std::filesystem::path(ALP_SCHEMA_DIR) / relative;
}

std::vector<GoldenCase> golden_cases() {
  using nlohmann::json;
  const json input = json::parse(read_file(fixture_path("matcher/golden_input.json")));
  const json expected = json::parse(read_file(fixture_path("matcher/golden_expected.json")));
  auto opt = [](const json& j, const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<std::string>();
  };
  std::vector<GoldenCase> out;
  for (std::size_t i = 0; i < input.at("cases").size(); ++i) {
    const json& in = input["cases"][i];
    const json& ex = expected.at("cases").at(i);
    GoldenCase c;
    c.name = in.at("name").get<std::string>();
    std::vector<DcElement> els;
    for (const char* key : {"title", "creator", "date", "publisher"}) {
      if (auto v = opt(in["record"], key)) els.push_back(el(key, *v));
    }
    c.record = make_record(assign_id("monet", static_cast<long long>(i)), els);
    for (const json& cj : in.at("candidates")) {
      matcher::ProviderRecord p;
      p.provider = parse_provider(cj.at("provider").get<std::string>()).value();
      p.provider_record_id = cj.at("id").get<std::string>();
      p.title = opt(cj, "title");
      p.creator = opt(cj, "creator");
      p.date = opt(cj, "date");
      p.publisher = opt(cj, "publisher");
      p.access_url = cj.at("url").get<std::string>();
      c.candidates.push_back(std::move(p));
    }
    for (const json& sj : ex.at("scores")) {
      matcher::Scores s;
      s.title_sim = sj.at("title_sim").get<double>();
      s.creator_sim = sj.at("creator_sim").get<double>();
      s.year_score = sj.at("year_score").get<double>();
      s.publisher_sim = sj.at("publisher_sim").get<double>();
      s.total = sj.at("total").get<double>();
      c.expected.push_back(s);
    }
    c.verdict = ex.at("verdict").get<std::string>();
    if (!ex.at("chosen").is_null()) {
      c.chosen = std::pair{ex["chosen"].at("provider").get<std::string>(),
                           ex["chosen"].at("id").get<std::string>()};
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<AssetRecord> write_fixture_assets(const fs::path& root) {
  const fs::path src = root / "incoming";
  fs::create_directories(src);
  struct Spec {
    const char* record;
    AssetKind kind;
    Rights rights;
    bool derivative;
    std::optional<std::size_t> mark;
  };
  const std::vector<Spec> specs = {
      {"monet-000002", AssetKind::DedicationPhoto, Rights::InCopyright, true, 0},
      {"monet-000001", AssetKind::AnnotationPhoto, Rights::Unknown, true, std::nullopt},
      {"monet-000002", AssetKind::AnnotationPhoto, Rights::PublicDomain, true, std::nullopt},
      {"monet-000003", AssetKind::OtherMarkPhoto, Rights::PublicDomain, false, 0},
      {"monet-000003", AssetKind::DedicationPhoto, Rights::InCopyright, true, std::nullopt},
      {"detaille-000001", AssetKind::OtherMarkPhoto, Rights::Unknown, true, std::nullopt},
      {"detaille-000002", AssetKind::DedicationPhoto, Rights::PublicDomain, false, std::nullopt},
      {"detaille-000003", AssetKind::AnnotationPhoto, Rights::InCopyright, true, std::nullopt},
  };
  std::vector<AssetRecord> out;
  StoreWriter writer(root);
  int n = 0;
  for (const auto& spec : specs) {
    const std::string stem = "photo" + std::to_string(++n);
    const fs::path original = src / (stem + ".jpg");
    write_file_atomic(original, "ORIGINAL " + stem);
    assets::Registration reg;
    reg.record_id = spec.record;
    reg.kind = spec.kind;
    reg.rights = spec.rights;
    reg.original = original;
    if (spec.derivative) {
      reg.derivative = src / (stem + "-1200.jpg");
      write_file_atomic(*reg.derivative, "DERIVATIVE " + stem);
    }
    reg.mark = spec.mark;
    out.push_back(assets::register_asset(writer, reg));
  }
  fs::remove_all(src);
  return out;
}

}  // namespace alp::testing
