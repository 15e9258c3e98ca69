#pragma once

// Tokenizer and phrase lexicon shared by the rule-based parser stages.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labflow::protocol::lex {

enum class TokenKind { kWord, kComma, kStop, kLabel };

struct Token {
  TokenKind kind;
  std::string text;  // lowercase, plural-folded
  std::size_t begin;
  std::size_t end;
};

std::vector<Token> tokenize(std::string_view text);

enum class VerbClass { kOpen, kClose, kPlace, kDiscard, kRemove, kUnscrew, kTighten, kPour, kGrasp, kMove, kPress, kWait };

enum class Category { kObject, kPart, kLocation, kVerb };

struct Entry {
  std::vector<std::string> words;
  Category category;
  std::string id;  // canonical object name, part/location label
  VerbClass verb = VerbClass::kWait;
  bool insertion = false;  // verbs that imply loading equipment
};

enum class EntityClass { kEquipment, kConsumable };

struct ObjectInfo {
  std::string_view name;
  std::string_view display;
  EntityClass entity_class;
  bool lidded;
  bool movable;
  std::string_view implied;  // storage rack implied by a mention, or empty
};

const ObjectInfo& object_info(std::string_view name);

enum class ItemKind { kWord, kComma, kStop, kLabel, kPhrase };

struct Item {
  ItemKind kind;
  const Entry* entry = nullptr;  // set for kPhrase
  std::string word;              // set for kWord
  std::size_t first_token;
  std::size_t last_token;  // inclusive
};

// Longest-match phrase segmentation of a token stream.
std::vector<Item> match_items(const std::vector<Token>& tokens);

bool is_filler(const Item& item);

}  // namespace labflow::protocol::lex
