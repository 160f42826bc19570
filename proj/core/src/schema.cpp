#include "seqlab/schema.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seqlab {

namespace {

std::atomic<TokenId> g_next_marker_id{kMarkerIdBase};

bool legal_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

}  // namespace

bool TagSchema::has_label(std::string_view label) const {
  for (const auto& l : labels_)
    if (l == label) return true;
  return false;
}

std::size_t TagSchema::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw LabelNotInSchema("label '" + std::string(label) + "' not in schema '" + name_ + "'");
}

std::string TagSchema::open_marker(std::string_view label) const {
  label_index(label);
  return "<" + std::string(label) + ">";
}

std::string TagSchema::close_marker(std::string_view label) const {
  label_index(label);
  return "</" + std::string(label) + ">";
}

TagSchema make_schema(std::string name, std::vector<std::string> labels) {
  if (labels.empty()) throw EmptyLabelSet("schema '" + name + "' has no labels");
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) throw IllegalLabelCharacter("empty label in schema '" + name + "'");
    for (char c : label)
      if (!legal_label_char(c))
        throw IllegalLabelCharacter("label '" + label + "' contains illegal character '" +
                                    std::string(1, c) + "'");
    if (!seen.insert(label).second) throw DuplicateLabel("duplicate label '" + label + "'");
  }

  TagSchema schema;
  schema.name_ = std::move(name);
  schema.labels_ = std::move(labels);
  schema.open_ids_.reserve(schema.labels_.size());
  schema.close_ids_.reserve(schema.labels_.size());
  for (std::size_t i = 0; i < schema.labels_.size(); ++i) {
    schema.open_ids_.push_back(g_next_marker_id.fetch_add(1));
    schema.close_ids_.push_back(g_next_marker_id.fetch_add(1));
  }
  return schema;
}

const std::map<std::string, TagSchema>& builtin_schemas() {
  static const std::map<std::string, TagSchema> registry = [] {
    std::map<std::string, TagSchema> m;
    auto add = [&m](const std::string& name, std::vector<std::string> labels) {
      m.emplace(name, make_schema(name, std::move(labels)));
    };
    add("ncbi-disease", {"Disease"});
    add("bc5cdr-disease", {"Disease"});
    add("bc5cdr-chem", {"Chemical"});
    add("diann", {"Disability"});
    add("e3c", {"ClinicalEntity"});
    add("pharmaconer", {"Pharmacological"});
    add("abstrct", {"Claim", "Premise"});
    return m;
  }();
  return registry;
}

TagSchema schema_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("schema JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("name") || !doc.contains("labels") ||
      !doc["name"].is_string() || !doc["labels"].is_array())
    throw Error("schema JSON must be {\"name\": string, \"labels\": [string,...]}");
  std::vector<std::string> labels;
  for (const auto& l : doc["labels"]) {
    if (!l.is_string()) throw Error("schema labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  return make_schema(doc["name"].get<std::string>(), std::move(labels));
}

TagSchema load_schema_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open schema file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return schema_from_json(buf.str());
}

void validate_sentence(const TaggedSentence& ts, const TagSchema& schema) {
  for (const auto& w : ts.words)
    if (w.empty()) throw InvalidSentence("empty word");
  std::size_t prev_end = 0;
  bool first = true;
  for (const auto& span : ts.spans) {
    if (span.start >= span.end) throw InvalidSentence("empty span");
    if (span.end > ts.words.size()) throw InvalidSentence("span exceeds sentence length");
    if (!first && span.start < prev_end)
      throw InvalidSentence("spans overlap or are out of order");
    if (!schema.has_label(span.label))
      throw LabelNotInSchema("label '" + span.label + "' not in schema '" + schema.name() + "'");
    prev_end = span.end;
    first = false;
  }
}

}  // namespace seqlab
