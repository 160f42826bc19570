#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/types.hpp"

namespace seqlab {

struct DuplicateLabel : Error {
  using Error::Error;
};
struct EmptyLabelSet : Error {
  using Error::Error;
};
struct IllegalLabelCharacter : Error {
  using Error::Error;
};
struct LabelNotInSchema : Error {
  using Error::Error;
};
struct InvalidSentence : Error {
  using Error::Error;
};

/// A dataset's entity labels and their tag-marker tokens. Each marker
/// ("<LABEL>" / "</LABEL>") owns a distinct special token id, disjoint from
/// ordinary token ids and EOS. Immutable after construction.
class TagSchema {
 public:
  TagSchema() = default;

  const std::string& name() const { return name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }

  bool has_label(std::string_view label) const;
  // Index of `label` in schema order; throws LabelNotInSchema when absent.
  std::size_t label_index(std::string_view label) const;

  std::string open_marker(std::string_view label) const;
  std::string close_marker(std::string_view label) const;

  TokenId open_id(std::size_t label_index) const { return open_ids_.at(label_index); }
  TokenId close_id(std::size_t label_index) const { return close_ids_.at(label_index); }

 private:
  friend TagSchema make_schema(std::string name, std::vector<std::string> labels);

  std::string name_;
  std::vector<std::string> labels_;
  std::vector<TokenId> open_ids_;
  std::vector<TokenId> close_ids_;
};

/// Builds a schema, allocating fresh distinct marker token ids.
/// Labels may contain letters, digits, hyphen and underscore only.
TagSchema make_schema(std::string name, std::vector<std::string> labels);

/// Registry of the built-in evaluation-task schemas (ncbi-disease,
/// bc5cdr-disease, bc5cdr-chem, diann, e3c, pharmaconer, abstrct).
const std::map<std::string, TagSchema>& builtin_schemas();

// Schema file: JSON object {"name": string, "labels": [string, ...]}.
TagSchema schema_from_json(std::string_view json_text);
TagSchema load_schema_file(const std::string& path);

/// Checks the TaggedSentence invariants (words non-empty, spans sorted,
/// disjoint, in-bounds, labels known). Throws InvalidSentence or
/// LabelNotInSchema.
void validate_sentence(const TaggedSentence& ts, const TagSchema& schema);

}  // namespace seqlab
