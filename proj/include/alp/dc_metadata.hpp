#pragma once

// Bibliographic metadata codecs: RAMEAU subject headings, the CSV ingest
// format and Dublin Core XML (oai_dc).

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/catalog.hpp"
#include "alp/error.hpp"

namespace alp::dc {

inline constexpr std::string_view kOaiDcNamespace = "http://www.openarchives.org/OAI/2.0/oai_dc/";
inline constexpr std::string_view kDcNamespace = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view kXmlNamespace = "http://www.w3.org/XML/1998/namespace";
// Namespace of the qualifier attribute and of the <refinements> block.
inline constexpr std::string_view kRefinementNamespace = "urn:x-alp:dc-refinements";

// ---------------------------------------------------------------------------
// RAMEAU headings: "Peinture -- France -- 19e siècle"

struct RameauHeading {
  std::string head;
  std::vector<std::string> subdivisions;

  friend bool operator==(const RameauHeading&, const RameauHeading&) = default;
};

class RameauParseError : public ParseError {
 public:
  RameauParseError(const std::string& message, std::size_t segment)
      : ParseError(message), segment_(segment) {}
  // 0 is the head, 1.. are subdivisions.
  std::size_t segment() const { return segment_; }

 private:
  std::size_t segment_;
};

RameauHeading parse_rameau(std::string_view raw);
std::string serialize_rameau(const RameauHeading& heading);

// ---------------------------------------------------------------------------
// CSV

struct CsvRow {
  int line = 0;  // physical line where the row starts, header is line 1
  std::vector<std::string> fields;
  std::optional<std::string> error;  // set for an unterminated quoted field
};

// RFC 4180 reader; never throws. Blank lines are skipped.
std::vector<CsvRow> read_csv(std::string_view bytes);
std::string csv_field(std::string_view value);
std::string csv_line(const std::vector<std::string>& fields);

inline constexpr std::array<std::string_view, 10> kIngestHeader = {
    "library_slug", "title", "creator", "date", "publisher",
    "language", "shelf_mark", "subjects", "marks", "rights"};

struct IngestRow {
  int line = 0;
  std::string library_slug;
  std::string title;
  std::optional<std::string> creator;
  std::optional<std::string> date;
  std::optional<std::string> publisher;
  std::optional<std::string> language;
  std::optional<std::string> shelf_mark;
  std::vector<RameauHeading> subjects;
  std::vector<ReadingMark> marks;
  Rights rights = Rights::Unknown;
};

struct RowError {
  int line = 0;
  std::string reason;
};

struct IngestParse {
  std::vector<IngestRow> rows;
  std::vector<RowError> errors;
};

// Thrown when the header row is missing or does not match kIngestHeader.
class IngestHeaderError : public ParseError {
 public:
  using ParseError::ParseError;
};

// `kind:locus[:transcription]` items separated by ';'. Throws ParseError.
std::vector<ReadingMark> parse_mark_descriptors(std::string_view cell);

// Every data row yields exactly one IngestRow or one RowError, in input order.
IngestParse parse_ingest_csv(std::string_view bytes);

// Elements are emitted as title, creator, date, publisher, language, then one
// subject per heading (qualifier "rameau").
BibRecord to_record(const IngestRow& row, std::string record_id);

// ---------------------------------------------------------------------------
// oai_dc XML

enum class QualifierPlacement {
  Attribute,  // <dc:date dcq:refinement="issued">
  Omit,       // plain oai_dc; qualifiers travel in refinements_xml()
};

std::string to_oai_dc_xml(const std::vector<DcElement>& elements,
                          QualifierPlacement placement = QualifierPlacement::Attribute);
std::string to_oai_dc_xml(const BibRecord& record,
                          QualifierPlacement placement = QualifierPlacement::Attribute);

class DcXmlError : public ParseError {
 public:
  DcXmlError(const std::string& message, std::vector<std::string> illegal)
      : ParseError(message), illegal_(std::move(illegal)) {}
  const std::vector<std::string>& illegal_names() const { return illegal_; }

 private:
  std::vector<std::string> illegal_;
};

// Inverse of to_oai_dc_xml. Throws xml::XmlError on malformed XML and
// DcXmlError naming every child that is not one of the fifteen DC elements.
std::vector<DcElement> from_oai_dc_xml(std::string_view fragment);

// <dcq:refinements> block listing (position, qualifier) for each qualified
// element; empty string when no element is qualified.
std::string refinements_xml(const std::vector<DcElement>& elements);
// Restores qualifiers recorded by refinements_xml(). Throws ParseError when a
// position is out of range.
void apply_refinements(std::vector<DcElement>& elements, std::string_view fragment);

}  // namespace alp::dc
