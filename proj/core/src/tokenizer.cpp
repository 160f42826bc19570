#include "seqlab/tokenizer.hpp"

namespace seqlab {

std::vector<TokenId> WordTokenizer::encode(std::string_view word) const {
  if (word.empty()) throw Error("cannot encode an empty word");
  std::lock_guard lock(mutex_);
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return {it->second};
  TokenId id = kOrdinaryIdBase + static_cast<TokenId>(words_.size());
  if (id >= kMarkerIdBase) throw Error("word vocabulary exhausted");
  words_.emplace_back(word);
  ids_.emplace(std::string(word), id);
  return {id};
}

std::string WordTokenizer::decode(std::span<const TokenId> ids) const {
  if (ids.size() != 1) throw Error("word tokenizer decodes exactly one id per word");
  std::lock_guard lock(mutex_);
  std::size_t index = static_cast<std::size_t>(ids[0] - kOrdinaryIdBase);
  if (ids[0] < kOrdinaryIdBase || index >= words_.size())
    throw Error("unknown token id " + std::to_string(ids[0]));
  return words_[index];
}

std::vector<TokenId> CharTokenizer::encode(std::string_view word) const {
  if (word.empty()) throw Error("cannot encode an empty word");
  std::vector<TokenId> ids;
  ids.reserve(word.size());
  for (unsigned char c : word) ids.push_back(kOrdinaryIdBase + static_cast<TokenId>(c));
  return ids;
}

std::string CharTokenizer::decode(std::span<const TokenId> ids) const {
  std::string word;
  word.reserve(ids.size());
  for (TokenId id : ids) {
    if (id < kOrdinaryIdBase || id >= kOrdinaryIdBase + 256)
      throw Error("unknown token id " + std::to_string(id));
    word.push_back(static_cast<char>(static_cast<unsigned char>(id - kOrdinaryIdBase)));
  }
  if (word.empty()) throw Error("cannot decode an empty word");
  return word;
}

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view kind) {
  if (kind == "word") return std::make_unique<WordTokenizer>();
  if (kind == "char") return std::make_unique<CharTokenizer>();
  throw Error("unknown tokenizer '" + std::string(kind) + "' (expected word or char)");
}

}  // namespace seqlab
