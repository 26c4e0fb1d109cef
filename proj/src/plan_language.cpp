#include "planbench/plan_language.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace planbench {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::string join(const std::vector<std::string>& words, std::size_t from = 0) {
  std::string out;
  for (std::size_t i = from; i < words.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_decoration(char c) { return c == '*' || c == '`' || c == '"' || c == '\'' || c == '_'; }

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

// Phrase normalization for object resolution: lowercase words with
// surrounding punctuation removed.
std::vector<std::string> phrase_words(std::string_view phrase) {
  std::string lowered;
  lowered.reserve(phrase.size());
  for (char c : phrase) {
    if (c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?' || is_decoration(c)) {
      lowered.push_back(' ');
    } else {
      lowered.push_back(lower(c));
    }
  }
  return split_words(lowered);
}

bool noun_matches(const ObjectDescriptor& d, std::string_view noun) {
  return d.display_noun() == noun || to_string(d.category) == noun;
}

struct PlaceSplit {
  std::string first;
  std::string prep;
  std::string second;
};

// Splits "X <prep> Y" at the earliest preposition from the list.
std::optional<PlaceSplit> split_on_preposition(std::string_view rest,
                                               std::initializer_list<std::string_view> preps) {
  std::size_t best = std::string_view::npos;
  std::string_view best_prep;
  for (std::string_view p : preps) {
    const std::string needle = " " + std::string(p) + " ";
    const auto at = rest.find(needle);
    if (at != std::string_view::npos && (best == std::string_view::npos || at < best ||
                                         (at == best && p.size() > best_prep.size()))) {
      best = at;
      best_prep = p;
    }
  }
  if (best == std::string_view::npos) return std::nullopt;
  return PlaceSplit{std::string(rest.substr(0, best)), std::string(best_prep),
                    std::string(rest.substr(best + best_prep.size() + 2))};
}

const ObjectDescriptor* find_descriptor(Vocabulary vocab, std::string_view id) {
  for (const auto& d : vocab) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

std::string resolution_reason(const ObjectResolution& r, std::string_view phrase) {
  if (r.status == ObjectResolution::Status::ambiguous) {
    return "ambiguous object '" + std::string(phrase) + "' (" + std::to_string(r.candidates) +
           " candidates)";
  }
  return "unresolved object '" + std::string(phrase) + "'";
}

// Strips list numbering; returns nullopt for lines that are not list items.
std::optional<std::string_view> list_item_body(std::string_view line) {
  std::string_view s = trim(line);
  if (s.empty()) return std::nullopt;
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) {
    std::string_view rest = s.substr(digits + 1);
    if (rest.empty() || is_space(rest.front())) return trim(rest);
    return std::nullopt;
  }
  if (s.front() == '-' || s.front() == '*') {
    std::string_view rest = s.substr(1);
    if (!rest.empty() && is_space(rest.front())) return trim(rest);
    return std::nullopt;
  }
  if (starts_with(s, "\xE2\x80\xA2")) return trim(s.substr(3));
  return std::nullopt;
}

// Returns the text after a "Plan:" marker if the line is one.
std::optional<std::string_view> plan_marker_rest(std::string_view line) {
  std::string_view s = trim(line);
  while (!s.empty() && (s.front() == '#' || s.front() == '*' || is_space(s.front()))) s.remove_prefix(1);
  if (s.size() < 5) return std::nullopt;
  std::string head;
  for (char c : s.substr(0, 5)) head.push_back(lower(c));
  if (head != "plan:") {
    // "**Plan**:" style
    if (s.size() >= 7 && lower(s[0]) == 'p' && lower(s[1]) == 'l' && lower(s[2]) == 'a' &&
        lower(s[3]) == 'n' && s[4] == '*' && s[5] == '*' && s[6] == ':') {
      return trim(s.substr(7));
    }
    return std::nullopt;
  }
  std::string_view rest = s.substr(5);
  while (!rest.empty() && (rest.front() == '*' || is_space(rest.front()))) rest.remove_prefix(1);
  return trim(rest);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = i + 1;
    }
  }
  return lines;
}

}  // namespace

std::string normalize_line(std::string_view line) {
  std::string lowered;
  lowered.reserve(line.size());
  for (char c : line) lowered.push_back(is_decoration(c) ? ' ' : lower(c));
  std::string out = join(split_words(lowered));
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == ';' ||
                          out.back() == ':' || out.back() == '!' || out.back() == '?')) {
    out.pop_back();
    while (!out.empty() && out.back() == ' ') out.pop_back();
  }
  return out;
}

bool is_done_token(std::string_view normalized) {
  static constexpr std::array<std::string_view, 4> kDone = {"done", "task complete",
                                                            "task is complete", "finished"};
  return std::find(kDone.begin(), kDone.end(), normalized) != kDone.end();
}

ObjectResolution resolve_object(std::string_view phrase, Vocabulary vocab) {
  std::vector<std::string> words = phrase_words(phrase);
  std::vector<const ObjectDescriptor*> matches;

  // "letter X", optionally preceded by a color.
  const auto letter_at = std::find(words.begin(), words.end(), "letter");
  if (letter_at != words.end() && letter_at + 1 != words.end() && (letter_at + 1)->size() == 1 &&
      std::isalpha(static_cast<unsigned char>((*(letter_at + 1))[0]))) {
    const char glyph = static_cast<char>(std::toupper(static_cast<unsigned char>((*(letter_at + 1))[0])));
    std::optional<Color> color;
    if (letter_at != words.begin()) color = parse_color(*(letter_at - 1));
    for (const auto& d : vocab) {
      if (d.category == Category::letter && d.glyph == glyph && (!color || d.color == *color)) {
        matches.push_back(&d);
      }
    }
  } else {
    std::erase_if(words, [](const std::string& w) { return w == "the" || w == "a" || w == "an"; });
    if (words.empty()) return {};
    std::optional<Color> color = parse_color(words.front());
    const std::string noun = color ? join(words, 1) : join(words);
    if (noun.empty()) return {};
    for (const auto& d : vocab) {
      if ((!color || d.color == *color) && noun_matches(d, noun)) matches.push_back(&d);
    }
  }
  ObjectResolution r;
  r.candidates = matches.size();
  if (matches.size() == 1) {
    r.status = ObjectResolution::Status::resolved;
    r.id = matches.front()->id;
  } else if (matches.size() > 1) {
    r.status = ObjectResolution::Status::ambiguous;
  }
  return r;
}

StepParse parse_step(std::string_view line, Vocabulary vocab) {
  const std::string norm = normalize_line(line);
  if (is_done_token(norm)) return DoneToken{};
  if (norm.empty()) return StructureError{std::string(line), "empty step"};

  SkillInvocation inv;
  std::vector<std::string> phrases;
  if (norm == "wait") {
    inv.skill = SkillName::wait;
  } else if (starts_with(norm, "pick up ")) {
    inv.skill = SkillName::pick_up;
    phrases.push_back(norm.substr(8));
  } else if (starts_with(norm, "open ")) {
    inv.skill = SkillName::open;
    phrases.push_back(norm.substr(5));
  } else if (starts_with(norm, "close ")) {
    inv.skill = SkillName::close;
    phrases.push_back(norm.substr(6));
  } else if (starts_with(norm, "place ")) {
    auto split = split_on_preposition(std::string_view(norm).substr(6), {"in", "on", "into", "onto"});
    if (!split) return StructureError{std::string(line), "place needs 'in' or 'on' and a destination"};
    inv.skill = SkillName::place;
    phrases = {split->first, split->second};
  } else if (starts_with(norm, "pour ")) {
    auto split = split_on_preposition(std::string_view(norm).substr(5), {"into", "onto", "in", "on"});
    if (!split) return StructureError{std::string(line), "pour needs 'into' or 'onto' and a destination"};
    inv.skill = SkillName::pour;
    phrases = {split->first, split->second};
  } else {
    return StructureError{std::string(line), "no matching skill"};
  }

  for (const std::string& phrase : phrases) {
    const ObjectResolution r = resolve_object(phrase, vocab);
    if (r.status != ObjectResolution::Status::resolved) {
      return StructureError{std::string(line), resolution_reason(r, phrase)};
    }
    inv.args.push_back(r.id);
  }
  inv.raw_phrases = std::move(phrases);
  return inv;
}

ParseOutcome parse_plan(std::string_view response, Vocabulary vocab) {
  const auto lines = split_lines(response);

  // Candidate item bodies with their original lines.
  std::vector<std::pair<std::string_view, std::string_view>> items;
  std::size_t start = 0;
  std::optional<std::string_view> inline_first;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto rest = plan_marker_rest(lines[i])) {
      start = i + 1;
      if (!rest->empty()) inline_first = *rest;
      break;
    }
  }
  if (inline_first) {
    if (auto body = list_item_body(*inline_first)) {
      items.emplace_back(*body, *inline_first);
    } else {
      items.emplace_back(*inline_first, *inline_first);
    }
  }
  for (std::size_t i = start; i < lines.size(); ++i) {
    const auto body = list_item_body(lines[i]);
    if (body) {
      items.emplace_back(*body, lines[i]);
      continue;
    }
    if (trim(lines[i]).empty()) continue;
    if (!items.empty()) break;
  }
  if (items.empty()) return EmptyResponse{};

  Plan plan;
  for (const auto& [body, original] : items) {
    StepParse step = parse_step(body, vocab);
    if (std::holds_alternative<DoneToken>(step)) {
      plan.terminated = true;
      break;
    }
    if (auto* err = std::get_if<StructureError>(&step)) {
      return StructureError{std::string(original), err->reason};
    }
    plan.steps.push_back(std::get<SkillInvocation>(std::move(step)));
  }
  return plan;
}

std::string format_invocation(const SkillInvocation& inv, Vocabulary vocab) {
  auto phrase = [&](std::size_t k) {
    const ObjectDescriptor* d = find_descriptor(vocab, inv.args.at(k));
    return d ? canonical_phrase(*d) : inv.args.at(k);
  };
  auto receptacle = [&](std::size_t k) {
    const ObjectDescriptor* d = find_descriptor(vocab, inv.args.at(k));
    return d && (d->category == Category::bowl || d->category == Category::container);
  };
  switch (inv.skill) {
    case SkillName::pick_up: return "pick up " + phrase(0);
    case SkillName::place:
      return "place " + phrase(0) + (receptacle(1) ? " in " : " on ") + phrase(1);
    case SkillName::open: return "open " + phrase(0);
    case SkillName::close: return "close " + phrase(0);
    case SkillName::pour: return "pour " + phrase(0) + " into " + phrase(1);
    case SkillName::wait: return "wait";
  }
  return {};
}

std::string format_invocation(const SkillInvocation& inv, const ObjectTable& table) {
  return format_invocation(inv, Vocabulary(table.objects()));
}

std::string format_action(const Action& action, const ObjectTable& table) {
  switch (action.skill) {
    case SkillName::pick_up: return "pick up " + table.phrase(action.a);
    case SkillName::place:
      return "place " + table.phrase(action.a) + (table.is_receptacle(action.b) ? " in " : " on ") +
             table.phrase(action.b);
    case SkillName::open: return "open " + table.phrase(action.a);
    case SkillName::close: return "close " + table.phrase(action.a);
    case SkillName::pour: return "pour " + table.phrase(action.a) + " into " + table.phrase(action.b);
    case SkillName::wait: return "wait";
  }
  return {};
}

std::string format_plan(const Plan& plan, const ObjectTable& table) {
  std::ostringstream out;
  std::size_t n = 0;
  for (const auto& step : plan.steps) out << ++n << ". " << format_invocation(step, table) << '\n';
  if (plan.terminated) out << ++n << ". done\n";
  return out.str();
}

std::optional<std::vector<std::string>> parse_inventory(std::string_view response) {
  for (std::string_view line : split_lines(response)) {
    std::string_view s = trim(line);
    while (!s.empty() && (s.front() == '*' || s.front() == '#' || is_space(s.front()))) s.remove_prefix(1);
    std::string head;
    for (char c : s.substr(0, std::min<std::size_t>(s.size(), 16))) head.push_back(lower(c));
    std::size_t skip = 0;
    if (starts_with(head, "visible objects:")) {
      skip = 16;
    } else if (starts_with(head, "objects:")) {
      skip = 8;
    } else {
      continue;
    }
    std::vector<std::string> phrases;
    std::string rest(s.substr(skip));
    // "a, b and c" lists
    std::string normalized;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest.compare(i, 5, " and ") == 0) {
        normalized += ", ";
        i += 4;
      } else {
        normalized.push_back(rest[i]);
      }
    }
    std::string cur;
    auto flush = [&] {
      const std::string item = normalize_line(cur);
      if (!item.empty() && item != "none") phrases.push_back(item);
      cur.clear();
    };
    for (char c : normalized) {
      if (c == ',') {
        flush();
      } else {
        cur.push_back(c);
      }
    }
    flush();
    return phrases;
  }
  return std::nullopt;
}

}  // namespace planbench
