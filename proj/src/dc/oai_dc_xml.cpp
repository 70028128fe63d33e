#include <string>

#include "alp/dc_metadata.hpp"
#include "alp/xml.hpp"

namespace alp::dc {

std::string to_oai_dc_xml(const std::vector<DcElement>& elements, QualifierPlacement placement) {
  bool qualified = false;
  for (const auto& e : elements) qualified = qualified || e.qualifier.has_value();
  const bool with_attr = qualified && placement == QualifierPlacement::Attribute;

  std::string out = "<oai_dc:dc xmlns:oai_dc=\"";
  out += kOaiDcNamespace;
  out += "\" xmlns:dc=\"";
  out += kDcNamespace;
  out += "\"";
  if (with_attr) {
    out += " xmlns:dcq=\"";
    out += kRefinementNamespace;
    out += "\"";
  }
  out += ">";
  for (const auto& e : elements) {
    out += "<dc:" + e.name;
    if (e.lang) out += " xml:lang=\"" + xml::escape_attribute(*e.lang) + "\"";
    if (with_attr && e.qualifier) {
      out += " dcq:refinement=\"" + xml::escape_attribute(*e.qualifier) + "\"";
    }
    out += ">" + xml::escape(e.value) + "</dc:" + e.name + ">";
  }
  out += "</oai_dc:dc>";
  return out;
}

std::string to_oai_dc_xml(const BibRecord& record, QualifierPlacement placement) {
  return to_oai_dc_xml(record.elements, placement);
}

std::vector<DcElement> from_oai_dc_xml(std::string_view fragment) {
  const xml::Node root = xml::parse(fragment);
  if (root.name.ns != kOaiDcNamespace || root.name.local != "dc") {
    throw DcXmlError("root element must be oai_dc:dc", {root.name.local});
  }
  std::vector<DcElement> out;
  std::vector<std::string> illegal;
  for (const auto& child : root.children) {
    if (child.name.ns != kDcNamespace || !is_dc_element_name(child.name.local)) {
      illegal.push_back(child.name.local);
      continue;
    }
    DcElement e;
    e.name = child.name.local;
    e.value = child.text;
    e.lang = child.attribute(kXmlNamespace, "lang");
    e.qualifier = child.attribute(kRefinementNamespace, "refinement");
    out.push_back(std::move(e));
  }
  if (!illegal.empty()) {
    std::string msg = "illegal Dublin Core elements:";
    for (const auto& n : illegal) msg += " " + n;
    throw DcXmlError(msg, std::move(illegal));
  }
  return out;
}

std::string refinements_xml(const std::vector<DcElement>& elements) {
  std::string body;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!elements[i].qualifier) continue;
    body += "<dcq:refinement position=\"" + std::to_string(i) + "\" qualifier=\"" +
            xml::escape_attribute(*elements[i].qualifier) + "\"/>";
  }
  if (body.empty()) return {};
  return "<dcq:refinements xmlns:dcq=\"" + std::string(kRefinementNamespace) + "\">" + body +
         "</dcq:refinements>";
}

void apply_refinements(std::vector<DcElement>& elements, std::string_view fragment) {
  const xml::Node root = xml::parse(fragment);
  if (root.name.ns != kRefinementNamespace || root.name.local != "refinements") {
    throw ParseError("expected dcq:refinements");
  }
  for (const auto& child : root.children) {
    if (child.name.ns != kRefinementNamespace || child.name.local != "refinement") continue;
    const auto position = child.attribute("", "position");
    const auto qualifier = child.attribute("", "qualifier");
    if (!position || !qualifier) throw ParseError("refinement needs position and qualifier");
    std::size_t pos = 0;
    try {
      pos = std::stoul(*position);
    } catch (const std::exception&) {
      throw ParseError("refinement position is not a number");
    }
    if (pos >= elements.size()) throw ParseError("refinement position out of range");
    elements[pos].qualifier = *qualifier;
  }
}

}  // namespace alp::dc
