#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqlab/types.hpp"

namespace seqlab {

/// Deterministic subword interface: encode() maps one word to a non-empty
/// sequence of ordinary token ids, decode() is its exact inverse. Instances
/// are safe to share across threads.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<TokenId> encode(std::string_view word) const = 0;
  // Inverse of encode for a single word's id sequence.
  virtual std::string decode(std::span<const TokenId> ids) const = 0;
  virtual std::string_view name() const = 0;
};

/// One token per word. Ids are interned in first-encounter order, so a fixed
/// instance always maps a given word to the same id.
class WordTokenizer final : public Tokenizer {
 public:
  std::vector<TokenId> encode(std::string_view word) const override;
  std::string decode(std::span<const TokenId> ids) const override;
  std::string_view name() const override { return "word"; }

 private:
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, TokenId> ids_;
  mutable std::vector<std::string> words_;
};

/// One token per byte; exercises multi-subtoken words. Ids are fixed
/// (kOrdinaryIdBase + byte value) and identical across instances.
class CharTokenizer final : public Tokenizer {
 public:
  std::vector<TokenId> encode(std::string_view word) const override;
  std::string decode(std::span<const TokenId> ids) const override;
  std::string_view name() const override { return "char"; }
};

// kind: "word" or "char"
std::unique_ptr<Tokenizer> make_tokenizer(std::string_view kind);

}  // namespace seqlab
