#include "labflow/protocol/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "labflow/core/errors.hpp"
#include "labflow/core/http_client.hpp"
#include "lexicon.hpp"

namespace labflow::protocol {

namespace {

using lex::Category;
using lex::Item;
using lex::ItemKind;
using lex::VerbClass;

bool is_verb(const Item& item) { return item.kind == ItemKind::kPhrase && item.entry->category == Category::kVerb; }
bool is_object(const Item& item) { return item.kind == ItemKind::kPhrase && item.entry->category == Category::kObject; }
bool is_part(const Item& item, std::string_view id) {
  return item.kind == ItemKind::kPhrase && item.entry->category == Category::kPart && item.entry->id == id;
}

std::string trim_collapse(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      out.push_back(c);
      space = false;
    }
  }
  return out;
}

struct Segment {
  std::vector<Item> items;
  std::string text;
};

struct Analysis {
  std::vector<lex::Token> tokens;
  std::vector<Segment> segments;
};

std::string segment_text(std::string_view source, const std::vector<lex::Token>& tokens, const std::vector<Item>& items) {
  auto begin = tokens[items.front().first_token].begin;
  auto end = tokens[items.back().last_token].end;
  auto text = trim_collapse(source.substr(begin, end - begin));
  if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

// Splits on sentence punctuation, step labels, "then", ", and", a comma
// before a verb, and "and" before a second verb.
Analysis analyze(std::string_view text) {
  Analysis a;
  a.tokens = lex::tokenize(text);
  auto items = lex::match_items(a.tokens);

  std::vector<Item> current;
  auto flush = [&] {
    while (!current.empty() && lex::is_filler(current.front())) current.erase(current.begin());
    while (!current.empty() && (current.back().kind == ItemKind::kComma || lex::is_filler(current.back()))) {
      current.pop_back();
    }
    if (!current.empty()) a.segments.push_back({current, segment_text(text, a.tokens, current)});
    current.clear();
  };
  auto has_verb = [&] { return std::any_of(current.begin(), current.end(), is_verb); };

  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const Item* next = i + 1 < items.size() ? &items[i + 1] : nullptr;
    if (it.kind == ItemKind::kStop || it.kind == ItemKind::kLabel) {
      flush();
    } else if (it.kind == ItemKind::kWord && it.word == "then") {
      if (!current.empty() && current.back().kind == ItemKind::kWord && current.back().word == "and") current.pop_back();
      flush();
    } else if (it.kind == ItemKind::kComma) {
      if (next && ((next->kind == ItemKind::kWord && next->word == "and") || is_verb(*next))) {
        flush();
        if (next->kind == ItemKind::kWord) ++i;
      }
    } else if (it.kind == ItemKind::kWord && it.word == "and" && next && is_verb(*next) && has_verb()) {
      flush();
    } else {
      current.push_back(it);
    }
  }
  flush();
  return a;
}

VerbClass effective_verb(const Segment& seg, const Item& verb) {
  auto cls = verb.entry->verb;
  bool cap = std::any_of(seg.items.begin(), seg.items.end(), [](const Item& i) { return is_part(i, "cap"); });
  if (cap && cls == VerbClass::kOpen) return VerbClass::kUnscrew;
  if (cap && cls == VerbClass::kClose) return VerbClass::kTighten;
  return cls;
}

ActionKind kind_of(VerbClass cls) {
  switch (cls) {
    case VerbClass::kOpen: return ActionKind::kOpenLid;
    case VerbClass::kClose: return ActionKind::kCloseLid;
    case VerbClass::kPlace:
    case VerbClass::kDiscard: return ActionKind::kPlace;
    case VerbClass::kRemove: return ActionKind::kRemove;
    case VerbClass::kUnscrew:
    case VerbClass::kTighten:
    case VerbClass::kGrasp: return ActionKind::kGrasp;
    case VerbClass::kPour:
    case VerbClass::kMove: return ActionKind::kMove;
    case VerbClass::kPress: return ActionKind::kPressButton;
    case VerbClass::kWait: return ActionKind::kWait;
  }
  return ActionKind::kWait;
}

enum class Role { kDirect, kDestination, kSource };

struct Mention {
  std::string name;
  Role role;
};

std::vector<Mention> mentions(const Segment& seg) {
  static const std::set<std::string, std::less<>> skip = {"the", "a", "an", "used", "empty", "full", "clean", "new",
                                                          "its", "their", "this", "that", "each", "one"};
  static const std::set<std::string, std::less<>> dest = {"into", "in", "to", "onto", "inside", "on", "toward", "towards"};
  std::vector<Mention> out;
  for (std::size_t i = 0; i < seg.items.size(); ++i) {
    if (!is_object(seg.items[i])) continue;
    Role role = Role::kDirect;
    std::size_t j = i;
    while (j > 0 && seg.items[j - 1].kind == ItemKind::kWord && skip.count(seg.items[j - 1].word)) --j;
    if (j > 0 && seg.items[j - 1].kind == ItemKind::kWord) {
      const auto& w = seg.items[j - 1].word;
      if (dest.count(w)) {
        role = Role::kDestination;
      } else if (w == "from" || (w == "of" && j > 1 && seg.items[j - 2].kind == ItemKind::kWord && seg.items[j - 2].word == "out")) {
        role = Role::kSource;
      }
    }
    out.push_back({seg.items[i].entry->id, role});
  }
  return out;
}

struct Context {
  std::optional<std::string> last_lidded;
  std::optional<std::string> last_movable;
};

struct Resolved {
  VerbClass verb;
  AtomicAction action;
};

[[noreturn]] void unmappable(const Segment& seg, const std::string& why) {
  fail(ErrorCode::kUnmappableAction, "'" + seg.text + "': " + why);
}

Resolved resolve(const Segment& seg, Context& ctx, const std::vector<ActionKind>& vocabulary) {
  auto verb_it = std::find_if(seg.items.begin(), seg.items.end(), is_verb);
  if (verb_it == seg.items.end()) unmappable(seg, "no action verb");
  const auto cls = effective_verb(seg, *verb_it);
  const auto ms = mentions(seg);

  auto first = [&](auto pred) -> std::optional<std::string> {
    for (const auto& m : ms) {
      if (pred(m)) return m.name;
    }
    return std::nullopt;
  };
  auto lidded = [](const Mention& m) { return lex::object_info(m.name).lidded; };
  auto movable = [](const Mention& m) { return lex::object_info(m.name).movable; };
  auto tube = [](const Mention& m) { return m.name == "tube_15ml" || m.name == "cryotube"; };

  auto subject_movable = [&](bool allow_context) -> std::string {
    auto s = first([&](const Mention& m) { return movable(m) && m.role != Role::kDestination; });
    if (!s && allow_context) s = ctx.last_movable;
    if (!s) unmappable(seg, "no object to manipulate");
    return *s;
  };
  auto other_than = [&](const std::string& subject, auto pred) -> std::optional<std::string> {
    return first([&](const Mention& m) { return m.name != subject && pred(m); });
  };

  AtomicAction action;
  action.kind = kind_of(cls);
  switch (cls) {
    case VerbClass::kOpen:
    case VerbClass::kClose: {
      auto s = first(lidded);
      if (!s) s = ctx.last_lidded;
      if (!s) unmappable(seg, "no lidded equipment");
      action.subject = *s;
      break;
    }
    case VerbClass::kPlace:
    case VerbClass::kMove: {
      action.subject = subject_movable(true);
      auto t = other_than(action.subject, [](const Mention& m) { return m.role == Role::kDestination; });
      if (!t) t = other_than(action.subject, [](const Mention&) { return true; });
      if (!t && cls == VerbClass::kPlace && verb_it->entry->insertion) t = ctx.last_lidded;
      if (!t) unmappable(seg, "no destination");
      action.target = *t;
      break;
    }
    case VerbClass::kDiscard:
      action.subject = subject_movable(true);
      action.target = "trash_bin";
      break;
    case VerbClass::kRemove: {
      action.subject = subject_movable(true);
      auto t = other_than(action.subject, [](const Mention& m) { return m.role != Role::kDestination; });
      if (t) action.target = *t;
      break;
    }
    case VerbClass::kUnscrew:
    case VerbClass::kTighten: {
      auto t = first(tube);
      if (!t && ctx.last_movable && ctx.last_movable != "float") t = ctx.last_movable;
      action.subject = "cap";
      action.target = t.value_or("tube_15ml");
      break;
    }
    case VerbClass::kPour: {
      auto s = first([&](const Mention& m) { return tube(m) && m.role != Role::kDestination; });
      if (!s && ctx.last_movable && ctx.last_movable != "float") s = ctx.last_movable;
      action.subject = s.value_or("tube_15ml");
      auto t = other_than(action.subject, [](const Mention& m) { return m.role == Role::kDestination; });
      action.target = t.value_or("serum_bottle");
      break;
    }
    case VerbClass::kGrasp: {
      auto s = first([&](const Mention& m) { return m.role != Role::kDestination; });
      if (!s) s = ctx.last_movable;
      if (!s) unmappable(seg, "no object to grasp");
      action.subject = *s;
      break;
    }
    case VerbClass::kPress: {
      auto s = first([](const Mention&) { return true; });
      if (!s) s = ctx.last_lidded;
      if (!s) unmappable(seg, "no equipment to press");
      action.subject = *s;
      break;
    }
    case VerbClass::kWait:
      break;
  }
  if (std::find(vocabulary.begin(), vocabulary.end(), action.kind) == vocabulary.end()) {
    unmappable(seg, std::string(action_kind_name(action.kind)) + " is not in the configured action vocabulary");
  }
  check_action_shape(action);

  for (const auto& m : ms) {
    if (lidded(m)) ctx.last_lidded = m.name;
  }
  if (cls != VerbClass::kUnscrew && cls != VerbClass::kTighten && cls != VerbClass::kWait &&
      lex::object_info(action.subject).movable) {
    ctx.last_movable = action.subject;
  }
  return {cls, action};
}

Condition cond(std::string predicate, std::vector<std::string> args, bool expected) {
  return Condition{std::move(predicate), std::move(args), expected};
}

struct Synthesis {
  Condition pre;
  Condition post;
  std::string key;
};

// Pre/post conditions mirror the world effect table so that a successful
// step always turns its precondition world into its postcondition world.
Synthesis synthesize(const Resolved& r) {
  const auto& a = r.action;
  const std::string& x = a.subject;
  const std::string y = a.target.value_or("");
  const std::string arm(kDefaultArm);
  auto lidded = [](const std::string& name) { return name == "centrifuge" || name == "water_bath"; };

  switch (r.verb) {
    case VerbClass::kOpen:
    case VerbClass::kClose: {
      bool open = r.verb == VerbClass::kOpen;
      std::string key = std::string(open ? "open_" : "close_") + (x == "centrifuge" ? "centrifuge_lid" : x == "water_bath" ? "water_bath_lid" : "lid");
      return {cond("lid_open", {x}, !open), cond("lid_open", {x}, open), key};
    }
    case VerbClass::kPlace:
    case VerbClass::kDiscard:
    case VerbClass::kMove: {
      const bool place = a.kind == ActionKind::kPlace;
      if (!place && y == "serum_bottle") {
        return {cond("contains_liquid", {x}, true), cond("contains_liquid", {x}, false), "pour_waste_liquid"};
      }
      if (y == "trash_bin") {
        std::string key = !place ? "move_object"
                          : x == "tube_15ml" ? "discard_centrifuge_tube"
                          : x == "cryotube"  ? "discard_cryotube"
                                             : "place_object";
        return {cond("discarded", {x}, false), cond("discarded", {x}, true), key};
      }
      std::string key = place ? "place_object" : "move_object";
      if (place && x == "tube_15ml" && y == "centrifuge") key = "insert_tube_to_centrifuge";
      if (place && x == "tube_15ml" && y == "tube_rack_orange") key = "place_centrifuge_tube_to_orange_rack";
      if (place && x == "cryotube" && y == "cryo_rack_red") key = "place_cryotube_to_red_rack";
      if (place && x == "float" && y == "water_bath") key = "place_float_to_water_bath";
      if (place && lidded(y)) return {cond("lid_open", {y}, true), cond("in", {x, y}, true), key};
      return {cond("discarded", {x}, false), cond("in", {x, y}, true), key};
    }
    case VerbClass::kRemove: {
      if (y.empty()) return {cond("held", {x, arm}, false), cond("held", {x, arm}, true), "remove_object"};
      std::string key = "remove_object";
      if (x == "tube_15ml" && y == "centrifuge") key = "remove_tube_from_centrifuge";
      if (x == "float" && y == "water_bath") key = "remove_float_from_water_bath";
      if (lidded(y)) return {cond("lid_open", {y}, true), cond("in", {x, y}, false), key};
      return {cond("in", {x, y}, true), cond("in", {x, y}, false), key};
    }
    case VerbClass::kUnscrew:
      return {cond("cap_tight", {y}, true), cond("cap_tight", {y}, false), "unscrew_tube_cap"};
    case VerbClass::kTighten:
      return {cond("cap_tight", {y}, false), cond("cap_tight", {y}, true), "tighten_tube_cap"};
    case VerbClass::kPour: {
      if (y == "serum_bottle") return {cond("contains_liquid", {x}, true), cond("contains_liquid", {x}, false), "pour_waste_liquid"};
      return {cond("discarded", {x}, false), cond("in", {x, y}, true), "move_object"};
    }
    case VerbClass::kGrasp:
      return {cond("held", {x, arm}, false), cond("held", {x, arm}, true), "grasp_object"};
    case VerbClass::kPress:
      if (lidded(x)) return {cond("lid_open", {x}, false), cond("lid_open", {x}, false), "press_button"};
      return {always_condition(), always_condition(), "press_button"};
    case VerbClass::kWait:
      return {always_condition(), always_condition(), "wait"};
  }
  return {always_condition(), always_condition(), "wait"};
}

EntitySet entities_of(const std::vector<Item>& items) {
  EntitySet e;
  std::vector<std::string> implied;
  auto add = [](std::vector<std::string>& v, std::string_view s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.emplace_back(s);
  };
  for (const auto& it : items) {
    if (it.kind != ItemKind::kPhrase) continue;
    switch (it.entry->category) {
      case Category::kObject: {
        const auto& info = lex::object_info(it.entry->id);
        add(info.entity_class == lex::EntityClass::kConsumable ? e.consumables : e.equipment, info.display);
        if (!info.implied.empty()) add(implied, info.implied);
        break;
      }
      case Category::kPart: add(e.targets, it.entry->id); break;
      case Category::kLocation: add(e.locations, it.entry->id); break;
      case Category::kVerb: break;
    }
  }
  for (const auto& s : implied) add(e.equipment, s);
  return e;
}

void require_text(const Protocol& protocol) {
  if (trim_collapse(protocol.text).empty()) fail(ErrorCode::kParse, "protocol text is empty");
}

std::vector<Resolved> resolve_all(const Analysis& a, const std::vector<ActionKind>& vocabulary) {
  std::vector<Resolved> out;
  Context ctx;
  for (const auto& seg : a.segments) {
    if (std::none_of(seg.items.begin(), seg.items.end(), is_verb)) {
      fail(ErrorCode::kParse, "no recognizable action in '" + seg.text + "'");
    }
    out.push_back(resolve(seg, ctx, vocabulary));
  }
  return out;
}

TaskPlan parse_rule_based(const Protocol& protocol, const ParserConfig& cfg) {
  TaskPlan plan;
  plan.intent = extract_intent(protocol, cfg);
  auto analysis = analyze(protocol.text);
  auto resolved = resolve_all(analysis, cfg.action_vocabulary);
  bool bimanual = false;
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    const auto& r = resolved[i];
    auto syn = synthesize(r);
    SubtaskUnit s;
    s.id = static_cast<int>(i) + 1;
    s.instruction = analysis.segments[i].text;
    s.precondition = std::move(syn.pre);
    s.postcondition = std::move(syn.post);
    s.knowledge_index = std::move(syn.key);
    s.action = r.action;
    s.entities = entities_of(analysis.segments[i].items);
    plan.subtasks.push_back(std::move(s));
    bimanual = bimanual || r.verb == VerbClass::kUnscrew || r.verb == VerbClass::kTighten || r.verb == VerbClass::kPour;
  }
  if (bimanual) plan.tags.emplace_back(kBimanualTag);
  plan.raw_parser_output = to_json(plan).dump();
  return plan;
}

TaskPlan parse_remote(const Protocol& protocol, const ParserConfig& cfg) {
  if (!cfg.remote_endpoint) fail(ErrorCode::kBackend, "remote parser backend requires remote_endpoint");
  Json request{{"prompt", build_parser_prompt(cfg)}, {"protocol", protocol.text}};
  auto body = post_json(*cfg.remote_endpoint, request, cfg.timeout_seconds);
  return plan_from_text(body, cfg.action_vocabulary);
}

}  // namespace

Intent extract_intent(const Protocol& protocol, const ParserConfig&) {
  require_text(protocol);
  auto a = analyze(protocol.text);
  std::set<VerbClass> verbs;
  bool loading = false, sorting = false, disposal = false;
  for (const auto& seg : a.segments) {
    auto v = std::find_if(seg.items.begin(), seg.items.end(), is_verb);
    if (v == seg.items.end()) continue;
    auto cls = effective_verb(seg, *v);
    verbs.insert(cls);
    auto ms = mentions(seg);
    auto mentions_any = [&](auto pred) { return std::any_of(ms.begin(), ms.end(), pred); };
    if (cls == VerbClass::kPlace || cls == VerbClass::kMove) {
      if (mentions_any([](const Mention& m) { return m.name == "trash_bin"; })) disposal = true;
      if (v->entry->insertion || mentions_any([](const Mention& m) { return lex::object_info(m.name).lidded; })) loading = true;
      if (mentions_any([](const Mention& m) { return m.name == "tube_rack_orange" || m.name == "cryo_rack_red"; })) sorting = true;
    }
  }
  for (const auto& t : a.tokens) {
    if (t.text == "sort" || t.text == "tidy" || t.text == "organize") sorting = true;
  }
  if (verbs.empty()) fail(ErrorCode::kParse, "no recognizable action in protocol");

  Intent intent;
  intent.goal = trim_collapse(protocol.text);
  if (verbs.count(VerbClass::kPour)) {
    intent.category = IntentCategory::kPouring;
  } else if (verbs.count(VerbClass::kUnscrew) || verbs.count(VerbClass::kTighten)) {
    intent.category = IntentCategory::kTwisting;
  } else if (verbs.count(VerbClass::kDiscard) || disposal) {
    intent.category = IntentCategory::kDisposal;
  } else if (verbs.count(VerbClass::kRemove)) {
    intent.category = IntentCategory::kUnloading;
  } else if (loading) {
    intent.category = IntentCategory::kLoading;
  } else if (sorting) {
    intent.category = IntentCategory::kSorting;
  } else {
    intent.category = IntentCategory::kOther;
  }
  return intent;
}

EntitySet extract_entities(const Protocol& protocol, const Intent&, const ParserConfig&) {
  auto tokens = lex::tokenize(protocol.text);
  return entities_of(lex::match_items(tokens));
}

AtomicAction map_action(std::string_view predicate, const std::vector<ActionKind>& vocabulary) {
  auto tokens = lex::tokenize(predicate);
  Segment seg;
  for (auto& it : lex::match_items(tokens)) {
    if (it.kind != ItemKind::kStop && it.kind != ItemKind::kComma) seg.items.push_back(std::move(it));
  }
  seg.text = trim_collapse(predicate);
  if (seg.text.empty()) throw std::invalid_argument("map_action: empty predicate");
  Context ctx;
  return resolve(seg, ctx, vocabulary).action;
}

std::vector<std::string> segment_protocol(std::string_view text) {
  std::vector<std::string> out;
  for (auto& seg : analyze(text).segments) out.push_back(std::move(seg.text));
  return out;
}

TaskPlan parse_protocol(const Protocol& protocol, const ParserConfig& cfg) {
  require_text(protocol);
  if (cfg.backend == ParserBackend::kRemote) return parse_remote(protocol, cfg);
  return parse_rule_based(protocol, cfg);
}

std::optional<ActionKind> classify_verb(std::string_view text) {
  auto tokens = lex::tokenize(text);
  Segment seg;
  seg.items = lex::match_items(tokens);
  auto v = std::find_if(seg.items.begin(), seg.items.end(), is_verb);
  if (v == seg.items.end()) return std::nullopt;
  return kind_of(effective_verb(seg, *v));
}

std::string build_parser_prompt(const ParserConfig& cfg) {
  std::string vocabulary;
  for (auto k : cfg.action_vocabulary) {
    if (!vocabulary.empty()) vocabulary += ", ";
    vocabulary += action_kind_name(k);
  }
  auto action_space = cfg.prompt_set.action_space;
  if (auto pos = action_space.find("{vocabulary}"); pos != std::string::npos) {
    action_space.replace(pos, std::string_view("{vocabulary}").size(), vocabulary);
  }
  const auto& p = cfg.prompt_set;
  return "## Role\n" + p.role + "\n\n## Intent\n" + p.intent + "\n\n## Entities\n" + p.entities + "\n\n## Action space\n" +
         action_space + "\n\n## Granularity\n" + p.granularity + "\n\n## Output\n" + p.output_rules + "\n";
}

}  // namespace labflow::protocol
