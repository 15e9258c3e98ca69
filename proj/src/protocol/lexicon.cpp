#include "lexicon.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace labflow::protocol::lex {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string fold_plural(std::string w) {
  static const std::map<std::string, std::string, std::less<>> plurals = {
      {"tubes", "tube"},   {"cryotubes", "cryotube"}, {"cryovials", "cryovial"}, {"racks", "rack"},
      {"lids", "lid"},     {"caps", "cap"},           {"floats", "float"},       {"bottles", "bottle"},
      {"bins", "bin"},     {"cans", "can"},           {"centrifuges", "centrifuge"}, {"baths", "bath"},
  };
  auto it = plurals.find(w);
  return it == plurals.end() ? w : it->second;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < n && (is_digit(text[j]) || (text[j] == '.' && j + 1 < n && is_digit(text[j + 1]) && j > i))) ++j;
      std::string num(text.substr(i, j - i));
      if (j < n && (text[j] == ':' || text[j] == ')')) {
        out.push_back({TokenKind::kLabel, num, i, j + 1});
        i = j + 1;
      } else {
        out.push_back({TokenKind::kWord, num, i, j});
        i = j;
      }
    } else if (is_alpha(c)) {
      std::size_t j = i;
      std::string w;
      while (j < n && (is_alpha(text[j]) || is_digit(text[j]))) {
        w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
        ++j;
      }
      if (w.size() == 1 && j < n && text[j] == ':') {
        out.push_back({TokenKind::kLabel, w, i, j + 1});
        i = j + 1;
      } else {
        out.push_back({TokenKind::kWord, fold_plural(std::move(w)), i, j});
        i = j;
      }
    } else if (c == ',') {
      out.push_back({TokenKind::kComma, ",", i, i + 1});
      ++i;
    } else if (c == '.' || c == '!' || c == '?' || c == ';' || c == ':' || c == '\n') {
      out.push_back({TokenKind::kStop, std::string(1, c), i, i + 1});
      ++i;
    } else {
      ++i;  // hyphens, brackets, quotes and stray symbols separate words
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_words(std::string_view phrase) {
  std::istringstream in{std::string(phrase)};
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

struct Seed {
  std::string_view phrase;
  Category category;
  std::string_view id;
  VerbClass verb = VerbClass::kWait;
  bool insertion = false;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    const Seed seeds[] = {
        // equipment and consumables
        {"by 80 c centrifuge", Category::kObject, "centrifuge"},
        {"centrifuge", Category::kObject, "centrifuge"},
        {"water bath float", Category::kObject, "float"},
        {"float", Category::kObject, "float"},
        {"water bath", Category::kObject, "water_bath"},
        {"waterbath", Category::kObject, "water_bath"},
        {"15 ml centrifuge tube", Category::kObject, "tube_15ml"},
        {"15 ml conical tube", Category::kObject, "tube_15ml"},
        {"15 ml tube", Category::kObject, "tube_15ml"},
        {"centrifuge tube", Category::kObject, "tube_15ml"},
        {"tube", Category::kObject, "tube_15ml"},
        {"1.8 ml cryotube", Category::kObject, "cryotube"},
        {"1.8 ml cryovial", Category::kObject, "cryotube"},
        {"cryotube", Category::kObject, "cryotube"},
        {"cryo tube", Category::kObject, "cryotube"},
        {"cryovial", Category::kObject, "cryotube"},
        {"orange centrifuge tube rack", Category::kObject, "tube_rack_orange"},
        {"centrifuge tube rack", Category::kObject, "tube_rack_orange"},
        {"orange tube rack", Category::kObject, "tube_rack_orange"},
        {"orange rack", Category::kObject, "tube_rack_orange"},
        {"tube rack", Category::kObject, "tube_rack_orange"},
        {"red cryotube rack", Category::kObject, "cryo_rack_red"},
        {"cryotube rack", Category::kObject, "cryo_rack_red"},
        {"red cryo rack", Category::kObject, "cryo_rack_red"},
        {"cryo rack", Category::kObject, "cryo_rack_red"},
        {"red rack", Category::kObject, "cryo_rack_red"},
        {"25 ml serum bottle", Category::kObject, "serum_bottle"},
        {"25 ml cerum bottle", Category::kObject, "serum_bottle"},
        {"serum bottle", Category::kObject, "serum_bottle"},
        {"cerum bottle", Category::kObject, "serum_bottle"},
        {"waste liquid bottle", Category::kObject, "serum_bottle"},
        {"waste bottle", Category::kObject, "serum_bottle"},
        {"trash can", Category::kObject, "trash_bin"},
        {"trash bin", Category::kObject, "trash_bin"},
        {"trash", Category::kObject, "trash_bin"},
        {"garbage bottle", Category::kObject, "trash_bin"},
        {"garbage bin", Category::kObject, "trash_bin"},
        {"garbage can", Category::kObject, "trash_bin"},
        {"waste bin", Category::kObject, "trash_bin"},
        {"bin", Category::kObject, "trash_bin"},
        // parts and materials
        {"lid", Category::kPart, "lid"},
        {"cover", Category::kPart, "lid"},
        {"cap", Category::kPart, "cap"},
        {"waste liquid", Category::kPart, "waste liquid"},
        {"supernatant", Category::kPart, "waste liquid"},
        {"liquid", Category::kPart, "waste liquid"},
        {"start button", Category::kPart, "button"},
        {"button", Category::kPart, "button"},
        // locations
        {"desktop", Category::kLocation, "desktop"},
        {"bench", Category::kLocation, "bench"},
        {"benchtop", Category::kLocation, "bench"},
        {"workbench", Category::kLocation, "bench"},
        {"table", Category::kLocation, "bench"},
        {"home position", Category::kLocation, "home position"},
        {"left", Category::kLocation, "left"},
        {"right", Category::kLocation, "right"},
        // verbs
        {"unlock and open", Category::kVerb, "open", VerbClass::kOpen},
        {"open", Category::kVerb, "open", VerbClass::kOpen},
        {"unlock", Category::kVerb, "open", VerbClass::kOpen},
        {"close", Category::kVerb, "close", VerbClass::kClose},
        {"shut", Category::kVerb, "close", VerbClass::kClose},
        {"close and lock", Category::kVerb, "close", VerbClass::kClose},
        {"place", Category::kVerb, "place", VerbClass::kPlace},
        {"put", Category::kVerb, "place", VerbClass::kPlace},
        {"return", Category::kVerb, "place", VerbClass::kPlace},
        {"insert", Category::kVerb, "place", VerbClass::kPlace, true},
        {"load", Category::kVerb, "place", VerbClass::kPlace, true},
        {"discard", Category::kVerb, "discard", VerbClass::kDiscard},
        {"dispose of", Category::kVerb, "discard", VerbClass::kDiscard},
        {"dispose", Category::kVerb, "discard", VerbClass::kDiscard},
        {"throw away", Category::kVerb, "discard", VerbClass::kDiscard},
        {"throw", Category::kVerb, "discard", VerbClass::kDiscard},
        {"remove", Category::kVerb, "remove", VerbClass::kRemove},
        {"take out", Category::kVerb, "remove", VerbClass::kRemove},
        {"unload", Category::kVerb, "remove", VerbClass::kRemove},
        {"withdraw", Category::kVerb, "remove", VerbClass::kRemove},
        {"retrieve", Category::kVerb, "remove", VerbClass::kRemove},
        {"unscrew", Category::kVerb, "unscrew", VerbClass::kUnscrew},
        {"loosen", Category::kVerb, "unscrew", VerbClass::kUnscrew},
        {"uncap", Category::kVerb, "unscrew", VerbClass::kUnscrew},
        {"twist off", Category::kVerb, "unscrew", VerbClass::kUnscrew},
        {"tighten", Category::kVerb, "tighten", VerbClass::kTighten},
        {"screw on", Category::kVerb, "tighten", VerbClass::kTighten},
        {"recap", Category::kVerb, "tighten", VerbClass::kTighten},
        {"twist on", Category::kVerb, "tighten", VerbClass::kTighten},
        {"pour", Category::kVerb, "pour", VerbClass::kPour},
        {"decant", Category::kVerb, "pour", VerbClass::kPour},
        {"grasp", Category::kVerb, "grasp", VerbClass::kGrasp},
        {"grab", Category::kVerb, "grasp", VerbClass::kGrasp},
        {"pick up", Category::kVerb, "grasp", VerbClass::kGrasp},
        {"hold", Category::kVerb, "grasp", VerbClass::kGrasp},
        {"move", Category::kVerb, "move", VerbClass::kMove},
        {"bring", Category::kVerb, "move", VerbClass::kMove},
        {"carry", Category::kVerb, "move", VerbClass::kMove},
        {"transport", Category::kVerb, "move", VerbClass::kMove},
        {"press", Category::kVerb, "press", VerbClass::kPress},
        {"push", Category::kVerb, "press", VerbClass::kPress},
        {"start", Category::kVerb, "press", VerbClass::kPress},
        {"wait", Category::kVerb, "wait", VerbClass::kWait},
        {"incubate", Category::kVerb, "wait", VerbClass::kWait},
        {"pause", Category::kVerb, "wait", VerbClass::kWait},
    };
    std::vector<Entry> t;
    for (const auto& s : seeds) {
      t.push_back(Entry{split_words(s.phrase), s.category, std::string(s.id), s.verb, s.insertion});
    }
    return t;
  }();
  return table;
}

}  // namespace

const ObjectInfo& object_info(std::string_view name) {
  static const ObjectInfo infos[] = {
      {"centrifuge", "centrifuge", EntityClass::kEquipment, true, false, ""},
      {"water_bath", "water bath", EntityClass::kEquipment, true, false, ""},
      {"tube_15ml", "centrifuge tube", EntityClass::kConsumable, false, true, "centrifuge tube rack"},
      {"cryotube", "cryotube", EntityClass::kConsumable, false, true, "cryotube rack"},
      {"tube_rack_orange", "centrifuge tube rack", EntityClass::kEquipment, false, false, ""},
      {"cryo_rack_red", "cryotube rack", EntityClass::kEquipment, false, false, ""},
      {"float", "water bath float", EntityClass::kEquipment, false, true, ""},
      {"serum_bottle", "serum bottle", EntityClass::kEquipment, false, false, ""},
      {"trash_bin", "trash bin", EntityClass::kEquipment, false, false, ""},
  };
  for (const auto& info : infos) {
    if (info.name == name) return info;
  }
  throw std::out_of_range("no lexicon object named " + std::string(name));
}

std::vector<Item> match_items(const std::vector<Token>& tokens) {
  std::vector<Item> items;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto& tok = tokens[i];
    if (tok.kind != TokenKind::kWord) {
      ItemKind kind = tok.kind == TokenKind::kComma ? ItemKind::kComma
                      : tok.kind == TokenKind::kStop ? ItemKind::kStop
                                                      : ItemKind::kLabel;
      items.push_back({kind, nullptr, tok.text, i, i});
      ++i;
      continue;
    }
    const Entry* best = nullptr;
    for (const auto& e : entries()) {
      if (best && e.words.size() <= best->words.size()) continue;
      if (i + e.words.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < e.words.size() && ok; ++k) {
        const auto& t = tokens[i + k];
        ok = t.kind == TokenKind::kWord && t.text == e.words[k];
      }
      if (ok) best = &e;
    }
    if (best) {
      items.push_back({ItemKind::kPhrase, best, {}, i, i + best->words.size() - 1});
      i += best->words.size();
    } else {
      items.push_back({ItemKind::kWord, nullptr, tok.text, i, i});
      ++i;
    }
  }
  return items;
}

bool is_filler(const Item& item) {
  static const std::set<std::string, std::less<>> filler = {
      "first", "firstly", "next",   "then",  "finally", "lastly",  "afterwards", "afterward", "subsequently",
      "now",   "please",  "step",   "second", "secondly", "third", "thirdly",   "and",       "also"};
  if (item.kind == ItemKind::kLabel) return true;
  if (item.kind != ItemKind::kWord) return false;
  if (!item.word.empty() && std::isdigit(static_cast<unsigned char>(item.word[0]))) return true;
  return filler.count(item.word) > 0;
}

}  // namespace labflow::protocol::lex
