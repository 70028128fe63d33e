#include <algorithm>

#include "alp/dc_metadata.hpp"
#include "alp/textnorm.hpp"

namespace alp::dc {

std::vector<CsvRow> read_csv(std::string_view bytes) {
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  int line = 1;
  while (i < bytes.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool row_done = false;
    bool blank = true;
    while (!row_done) {
      if (i >= bytes.size()) {
        row.fields.push_back(std::move(field));
        break;
      }
      const char c = bytes[i];
      if (c == '"' && field.empty()) {
        blank = false;
        ++i;
        bool closed = false;
        while (i < bytes.size()) {
          if (bytes[i] == '"') {
            if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (bytes[i] == '\n') ++line;
            field.push_back(bytes[i++]);
          }
        }
        if (!closed) {
          row.fields.push_back(std::move(field));
          row.error = "unterminated quoted field";
          break;
        }
        // Text after the closing quote is kept verbatim up to the separator.
        while (i < bytes.size() && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r') {
          field.push_back(bytes[i++]);
        }
        continue;
      }
      if (c == ',') {
        blank = false;
        row.fields.push_back(std::move(field));
        field.clear();
        ++i;
      } else if (c == '\r' || c == '\n') {
        row.fields.push_back(std::move(field));
        if (c == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
        ++i;
        ++line;
        row_done = true;
      } else {
        blank = false;
        field.push_back(c);
        ++i;
      }
    }
    if (!blank || row.error) rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out.push_back('\n');
  return out;
}

std::vector<ReadingMark> parse_mark_descriptors(std::string_view cell) {
  std::vector<ReadingMark> marks;
  std::size_t start = 0;
  std::size_t index = 0;
  while (start <= cell.size()) {
    auto end = cell.find(';', start);
    if (end == std::string_view::npos) end = cell.size();
    const std::string item = textnorm::trim(cell.substr(start, end - start));
    start = end + 1;
    ++index;
    if (item.empty()) continue;
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      throw ParseError("mark " + std::to_string(index) + ": expected kind:locus[:transcription]");
    }
    const auto kind = parse_mark_kind(textnorm::trim(std::string_view(item).substr(0, c1)));
    if (!kind) {
      throw ParseError("mark " + std::to_string(index) + ": unknown kind '" + item.substr(0, c1) + "'");
    }
    ReadingMark mark;
    mark.kind = *kind;
    const std::string_view rest = std::string_view(item).substr(c1 + 1);
    const auto c2 = rest.find(':');
    mark.locus = textnorm::trim(rest.substr(0, c2));
    if (c2 != std::string_view::npos) {
      std::string transcription = textnorm::trim(rest.substr(c2 + 1));
      if (!transcription.empty()) mark.transcription = std::move(transcription);
    }
    if (mark.locus.empty()) {
      throw ParseError("mark " + std::to_string(index) + ": locus is empty");
    }
    marks.push_back(std::move(mark));
  }
  return marks;
}

namespace {

std::optional<std::string> optional_cell(const std::string& raw) {
  std::string v = textnorm::trim(raw);
  if (v.empty()) return std::nullopt;
  return v;
}

IngestRow convert_row(const CsvRow& csv) {
  if (csv.error) throw ParseError(*csv.error);
  if (csv.fields.size() != kIngestHeader.size()) {
    throw ParseError("expected " + std::to_string(kIngestHeader.size()) + " fields, got " +
                     std::to_string(csv.fields.size()));
  }
  const auto& f = csv.fields;
  IngestRow row;
  row.line = csv.line;
  row.library_slug = textnorm::trim(f[0]);
  row.title = textnorm::trim(f[1]);
  if (row.library_slug.empty()) throw ParseError("library_slug mandatory");
  if (!is_valid_slug(row.library_slug)) throw ParseError("library_slug must match [a-z0-9_]+");
  if (row.title.empty()) throw ParseError("title mandatory");
  row.creator = optional_cell(f[2]);
  row.date = optional_cell(f[3]);
  row.publisher = optional_cell(f[4]);
  row.language = optional_cell(f[5]);
  row.shelf_mark = optional_cell(f[6]);

  const std::string_view subjects = f[7];
  std::size_t start = 0;
  std::size_t n = 0;
  while (start <= subjects.size()) {
    auto end = subjects.find("||", start);
    if (end == std::string_view::npos) end = subjects.size();
    const std::string raw = textnorm::trim(subjects.substr(start, end - start));
    start = end + 2;
    ++n;
    if (raw.empty()) continue;
    try {
      row.subjects.push_back(parse_rameau(raw));
    } catch (const RameauParseError& e) {
      throw ParseError("subject " + std::to_string(n) + ": " + e.what());
    }
  }

  row.marks = parse_mark_descriptors(f[8]);

  const std::string rights = textnorm::trim(f[9]);
  if (!rights.empty()) {
    if (rights != "public_domain" && rights != "in_copyright" && rights != "unknown") {
      throw ParseError("rights must be public_domain, in_copyright or unknown");
    }
    row.rights = *parse_rights(rights);
  }
  return row;
}

}  // namespace

IngestParse parse_ingest_csv(std::string_view bytes) {
  auto rows = read_csv(bytes);
  if (rows.empty()) throw IngestHeaderError("missing header row");
  const auto& header = rows.front();
  std::vector<std::string> names;
  for (const auto& h : header.fields) names.push_back(textnorm::trim(h));
  std::vector<std::string> missing;
  for (auto col : kIngestHeader) {
    if (std::find(names.begin(), names.end(), col) == names.end()) missing.emplace_back(col);
  }
  if (!missing.empty()) {
    std::string msg = "header is missing columns:";
    for (const auto& m : missing) msg += " " + m;
    throw IngestHeaderError(msg);
  }
  if (!std::equal(names.begin(), names.end(), kIngestHeader.begin(), kIngestHeader.end())) {
    throw IngestHeaderError("header columns must appear exactly in the documented order");
  }

  IngestParse out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    try {
      out.rows.push_back(convert_row(rows[i]));
    } catch (const std::exception& e) {
      out.errors.push_back(RowError{rows[i].line, e.what()});
    }
  }
  return out;
}

BibRecord to_record(const IngestRow& row, std::string record_id) {
  BibRecord r;
  r.record_id = std::move(record_id);
  r.library_slug = row.library_slug;
  r.elements.push_back({"title", std::nullopt, row.title, std::nullopt});
  if (row.creator) r.elements.push_back({"creator", std::nullopt, *row.creator, std::nullopt});
  if (row.date) r.elements.push_back({"date", std::nullopt, *row.date, std::nullopt});
  if (row.publisher) r.elements.push_back({"publisher", std::nullopt, *row.publisher, std::nullopt});
  if (row.language) r.elements.push_back({"language", std::nullopt, *row.language, std::nullopt});
  for (const auto& s : row.subjects) {
    r.elements.push_back({"subject", std::string("rameau"), serialize_rameau(s), std::nullopt});
  }
  r.shelf_mark = row.shelf_mark;
  r.marks = row.marks;
  r.rights = row.rights;
  return r;
}

}  // namespace alp::dc
