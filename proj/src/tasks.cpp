#include "planbench/tasks.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "planbench/error.hpp"
#include "planbench/oracle.hpp"
#include "planbench/render.hpp"
#include "planbench/rng.hpp"

namespace planbench {

namespace {

const std::vector<std::string> kWords = {"CAT", "DOG", "SUN", "BOX", "HAT", "MAP", "PEN", "CUP",
                                         "FOX", "JAR", "KEY", "OWL", "RUG", "VAN", "WEB", "LID"};
const std::string kVowels = "AEIOU";
const std::set<Color> kWarm = {Color::red, Color::orange, Color::yellow, Color::pink};

bool is_vowel(char g) { return kVowels.find(g) != std::string::npos; }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Draft {
  std::vector<ObjectDescriptor> objects;
  std::vector<Relation> relations;
  std::map<std::string, bool> open;
  std::vector<std::vector<std::size_t>> rows;  // objects per grid row, row index = position
  GoalSpec goal;
  std::vector<DisturbanceEvent> disturbances;
  std::map<SkillName, double> noise;
  bool random_walk_goal = false;
  bool cells_assigned = false;
};

std::size_t add(Draft& d, std::string id, Category category, Color color, std::string noun = "",
                std::optional<char> glyph = std::nullopt) {
  ObjectDescriptor o;
  o.id = std::move(id);
  o.category = category;
  o.color = color;
  o.noun = std::move(noun);
  o.glyph = glyph;
  d.objects.push_back(std::move(o));
  return d.objects.size() - 1;
}

void add_table(Draft& d) { add(d, "table", Category::fixture, Color::brown, "table"); }

std::string block_id(Color c) { return std::string("block_") + to_string(c); }
std::string bowl_id(Color c) { return std::string("bowl_") + to_string(c); }
std::string mat_id(Color c) { return std::string("mat_") + to_string(c); }
std::string letter_id(char g) { return std::string("letter_") + static_cast<char>(std::tolower(g)); }

std::vector<Color> draw_colors(Rng& rng, std::size_t k, const std::set<Color>& exclude = {}) {
  std::vector<Color> pool;
  for (Color c : kPalette) {
    if (!exclude.count(c)) pool.push_back(c);
  }
  rng.shuffle(pool);
  pool.resize(std::min(k, pool.size()));
  return pool;
}

std::vector<char> draw_glyphs(Rng& rng, std::size_t k, const std::string& pool_text,
                              const std::set<char>& exclude = {}) {
  std::vector<char> pool;
  for (char g : pool_text) {
    if (!exclude.count(g)) pool.push_back(g);
  }
  rng.shuffle(pool);
  pool.resize(std::min(k, pool.size()));
  return pool;
}

std::string consonants() {
  std::string out;
  for (char g = 'A'; g <= 'Z'; ++g) {
    if (!is_vowel(g)) out.push_back(g);
  }
  return out;
}

// Adds one row of objects resting on the table.
std::vector<std::size_t> add_row(Draft& d, std::vector<std::size_t> members) {
  for (std::size_t i : members) d.relations.push_back({RelationKind::on, d.objects[i].id, "table"});
  d.rows.push_back(members);
  return members;
}

// Rows are spread over the grid; columns are distinct across the whole scene
// when it fits, otherwise within each row.
void assign_cells(Draft& d, Rng& rng) {
  std::size_t total = 0;
  for (const auto& r : d.rows) total += r.size();
  std::vector<int> shared(kGridColumns);
  for (int c = 0; c < kGridColumns; ++c) shared[static_cast<std::size_t>(c)] = c;
  rng.shuffle(shared);
  std::size_t next_shared = 0;
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    const int y = static_cast<int>(1 + (r * 2) % static_cast<std::size_t>(kGridRows - 1));
    std::vector<int> cols;
    if (total <= static_cast<std::size_t>(kGridColumns)) {
      for (std::size_t k = 0; k < d.rows[r].size(); ++k) cols.push_back(shared[next_shared++]);
    } else {
      std::vector<int> own(kGridColumns);
      for (int c = 0; c < kGridColumns; ++c) own[static_cast<std::size_t>(c)] = c;
      rng.shuffle(own);
      cols.assign(own.begin(), own.begin() + static_cast<std::ptrdiff_t>(d.rows[r].size()));
    }
    for (std::size_t k = 0; k < d.rows[r].size(); ++k) d.objects[d.rows[r][k]].cell = Cell{cols[k], y};
  }
  d.cells_assigned = true;
}

std::vector<std::size_t> add_blocks(Draft& d, const std::vector<Color>& colors) {
  std::vector<std::size_t> out;
  for (Color c : colors) out.push_back(add(d, block_id(c), Category::block, c));
  return add_row(d, out);
}

std::vector<std::size_t> add_bowls(Draft& d, const std::vector<Color>& colors) {
  std::vector<std::size_t> out;
  for (Color c : colors) out.push_back(add(d, bowl_id(c), Category::bowl, c));
  return add_row(d, out);
}

std::vector<std::size_t> add_letters(Draft& d, Rng& rng, const std::vector<char>& glyphs) {
  std::vector<std::size_t> out;
  for (char g : glyphs) {
    out.push_back(add(d, letter_id(g), Category::letter, kPalette[rng.next_below(kPalette.size())], "", g));
  }
  return add_row(d, out);
}

std::vector<std::size_t> add_mats(Draft& d, Rng& rng, std::size_t n) {
  std::vector<std::size_t> out;
  for (Color c : draw_colors(rng, n)) out.push_back(add(d, mat_id(c), Category::fixture, c, "mat"));
  return add_row(d, out);
}

std::vector<std::string> ids_of(const Draft& d, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(d.objects[i].id);
  return out;
}

std::string fill(std::string text, const std::string& slot, const std::string& value) {
  const std::string key = "{" + slot + "}";
  for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key)) {
    text.replace(at, key.size(), value);
  }
  return text;
}

GoalExpr chain_left_of(const std::vector<std::string>& ordered) {
  std::vector<GoalExpr> atoms;
  for (std::size_t k = 0; k + 1 < ordered.size(); ++k) atoms.push_back(GoalExpr::left_of(ordered[k], ordered[k + 1]));
  return GoalExpr::conj(std::move(atoms));
}

std::vector<std::string> letter_ids(const std::vector<char>& glyphs) {
  std::vector<std::string> out;
  for (char g : glyphs) out.push_back(letter_id(g));
  return out;
}

using Generator = std::function<void(Draft&, Rng&, const TaskSpec&)>;

void gen_block_in_bowl(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto colors = draw_colors(rng, 5);
  const std::size_t nb = static_cast<std::size_t>(rng.next_int(2, 3));
  const std::size_t nw = static_cast<std::size_t>(rng.next_int(2, 3));
  std::vector<Color> blocks(colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(nb));
  std::vector<Color> bowls = {colors[0]};
  for (std::size_t k = nb; bowls.size() < nw; ++k) bowls.push_back(colors[k]);
  add_blocks(d, blocks);
  add_bowls(d, bowls);
  d.goal.instruction = fill(t.instruction_template, "color", to_string(colors[0]));
  d.goal.predicate = GoalExpr::in(block_id(colors[0]), bowl_id(colors[0]));
}

void gen_matching(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto colors = draw_colors(rng, 4);
  const std::size_t nb = static_cast<std::size_t>(rng.next_int(2, 3));
  std::vector<Color> blocks(colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(nb));
  std::vector<Color> bowls = blocks;
  if (rng.bernoulli(0.5)) bowls.push_back(colors[nb]);
  add_blocks(d, blocks);
  add_bowls(d, bowls);
  std::vector<GoalExpr> atoms;
  for (Color c : blocks) atoms.push_back(GoalExpr::in(block_id(c), bowl_id(c)));
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::conj(std::move(atoms));
}

void gen_stack(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto min_blocks = t.params.value("min_blocks", 3);
  const auto max_blocks = t.params.value("max_blocks", 4);
  const std::size_t nb = static_cast<std::size_t>(rng.next_int(min_blocks, max_blocks));
  const std::size_t nw = static_cast<std::size_t>(rng.next_int(0, t.params.value("max_bowls", 2)));
  const auto colors = draw_colors(rng, nb + nw);
  const auto blocks = add_blocks(d, {colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(nb)});
  if (nw > 0) add_bowls(d, {colors.begin() + static_cast<std::ptrdiff_t>(nb), colors.end()});
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::tower(ids_of(d, blocks));
}

void gen_mismatched(Draft& d, Rng& rng, const TaskSpec& t) {
  const std::size_t nb = static_cast<std::size_t>(rng.next_int(2, 3));
  const auto colors = draw_colors(rng, nb);
  add_blocks(d, colors);
  add_bowls(d, colors);
  std::vector<GoalExpr> per_block;
  for (Color b : colors) {
    std::vector<GoalExpr> options;
    for (Color w : colors) {
      if (w != b) options.push_back(GoalExpr::in(block_id(b), bowl_id(w)));
    }
    per_block.push_back(GoalExpr::disj(std::move(options)));
  }
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::conj(std::move(per_block));
}

void gen_one_bowl(Draft& d, Rng& rng, const TaskSpec& t) {
  const std::size_t nb = static_cast<std::size_t>(rng.next_int(2, 3));
  const auto colors = draw_colors(rng, nb + 2);
  const auto blocks = add_blocks(d, {colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(nb)});
  add_bowls(d, {colors[nb], colors[nb + 1]});
  d.goal.instruction = fill(t.instruction_template, "color", to_string(colors[nb]));
  d.goal.predicate = GoalExpr::count_in(ids_of(d, blocks), bowl_id(colors[nb]), static_cast<int>(nb));
}

void gen_warm_stack(Draft& d, Rng& rng, const TaskSpec& t) {
  std::set<Color> cool;
  for (Color c : kPalette) {
    if (!kWarm.count(c)) cool.insert(c);
  }
  const auto warm = draw_colors(rng, static_cast<std::size_t>(rng.next_int(2, 3)), cool);
  const auto cold = draw_colors(rng, static_cast<std::size_t>(rng.next_int(1, 2)), kWarm);
  std::vector<Color> all = warm;
  all.insert(all.end(), cold.begin(), cold.end());
  rng.shuffle(all);
  add_blocks(d, all);
  std::vector<std::string> tower;
  for (Color c : warm) tower.push_back(block_id(c));
  std::sort(tower.begin(), tower.end());
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::tower(tower);
}

void gen_sides(Draft& d, Rng& rng, const TaskSpec& t) {
  const std::size_t nb = static_cast<std::size_t>(rng.next_int(2, 3));
  const auto colors = draw_colors(rng, nb + 2);
  const auto blocks = add_blocks(d, {colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(nb)});
  const auto bowls = add_bowls(d, {colors[nb], colors[nb + 1]});
  std::vector<GoalExpr> atoms;
  for (std::size_t w : bowls) {
    for (std::size_t b : blocks) atoms.push_back(GoalExpr::left_of(d.objects[w].id, d.objects[b].id));
  }
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::conj(std::move(atoms));
}

void gen_two_towers(Draft& d, Rng& rng, const TaskSpec& t) {
  const std::size_t nw = static_cast<std::size_t>(rng.next_int(0, 1));
  const auto colors = draw_colors(rng, 4 + nw);
  const auto blocks = ids_of(d, add_blocks(d, {colors.begin(), colors.begin() + 4}));
  if (nw > 0) add_bowls(d, {colors[4]});
  std::vector<GoalExpr> pairings;
  for (std::size_t partner = 1; partner < 4; ++partner) {
    std::vector<std::string> first = {blocks[0], blocks[partner]};
    std::vector<std::string> second;
    for (std::size_t k = 1; k < 4; ++k) {
      if (k != partner) second.push_back(blocks[k]);
    }
    pairings.push_back(GoalExpr::conj({GoalExpr::tower(first), GoalExpr::tower(second)}));
  }
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::disj(std::move(pairings));
}

void gen_alpha(Draft& d, Rng& rng, const TaskSpec& t, bool reverse) {
  const std::size_t n = static_cast<std::size_t>(rng.next_int(3, t.params.value("max_letters", 5)));
  auto glyphs = draw_glyphs(rng, n, "ABCDEFGHIJKLMNOPQRSTUVWXYZ");
  add_letters(d, rng, glyphs);
  add_mats(d, rng, n);
  std::sort(glyphs.begin(), glyphs.end());
  if (reverse) std::reverse(glyphs.begin(), glyphs.end());
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = chain_left_of(letter_ids(glyphs));
}

std::string draw_word(Rng& rng) { return rng.pick(kWords); }

std::vector<char> word_glyphs(const std::string& word) { return {word.begin(), word.end()}; }

std::vector<char> with_distractors(Rng& rng, const std::string& word, std::size_t k) {
  auto glyphs = word_glyphs(word);
  const auto extra = draw_glyphs(rng, k, "ABCDEFGHIJKLMNOPQRSTUVWXYZ", {word.begin(), word.end()});
  glyphs.insert(glyphs.end(), extra.begin(), extra.end());
  rng.shuffle(glyphs);
  return glyphs;
}

void gen_spell(Draft& d, Rng& rng, const TaskSpec& t, std::size_t min_extra, std::size_t max_extra) {
  const std::string word = draw_word(rng);
  const auto glyphs = with_distractors(
      rng, word, static_cast<std::size_t>(rng.next_int(static_cast<int>(min_extra), static_cast<int>(max_extra))));
  add_letters(d, rng, glyphs);
  add_mats(d, rng, word.size());
  d.goal.instruction = fill(t.instruction_template, "word", word);
  d.goal.predicate = chain_left_of(letter_ids(word_glyphs(word)));
}

void gen_vowels(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto vowels = draw_glyphs(rng, static_cast<std::size_t>(rng.next_int(1, 2)), kVowels);
  const auto cons = draw_glyphs(rng, 4 - vowels.size(), consonants());
  std::vector<char> glyphs = vowels;
  glyphs.insert(glyphs.end(), cons.begin(), cons.end());
  rng.shuffle(glyphs);
  add_letters(d, rng, glyphs);
  const auto colors = draw_colors(rng, 2);
  add_bowls(d, colors);
  std::vector<GoalExpr> atoms;
  for (char g : vowels) atoms.push_back(GoalExpr::in(letter_id(g), bowl_id(colors[0])));
  d.goal.instruction = fill(t.instruction_template, "color", to_string(colors[0]));
  d.goal.predicate = GoalExpr::conj(std::move(atoms));
}

void gen_vc_sides(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto vowels = draw_glyphs(rng, static_cast<std::size_t>(rng.next_int(1, 2)), kVowels);
  const auto cons = draw_glyphs(rng, 4 - vowels.size(), consonants());
  std::vector<char> glyphs = vowels;
  glyphs.insert(glyphs.end(), cons.begin(), cons.end());
  rng.shuffle(glyphs);
  add_letters(d, rng, glyphs);
  add_mats(d, rng, 2);
  std::vector<GoalExpr> atoms;
  for (char v : vowels) {
    for (char c : cons) atoms.push_back(GoalExpr::left_of(letter_id(v), letter_id(c)));
  }
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::conj(std::move(atoms));
}

void gen_word_bowl(Draft& d, Rng& rng, const TaskSpec& t) {
  const std::string word = draw_word(rng);
  const auto glyphs = with_distractors(rng, word, static_cast<std::size_t>(rng.next_int(1, 2)));
  add_letters(d, rng, glyphs);
  const auto colors = draw_colors(rng, 2);
  add_bowls(d, colors);
  std::vector<GoalExpr> atoms;
  for (char g : word) atoms.push_back(GoalExpr::in(letter_id(g), bowl_id(colors[0])));
  d.goal.instruction = fill(fill(t.instruction_template, "word", word), "color", to_string(colors[0]));
  d.goal.predicate = GoalExpr::conj(std::move(atoms));
}

void gen_word_order(Draft& d, Rng& rng, const TaskSpec& t) {
  const std::string word = draw_word(rng);
  const auto glyphs = with_distractors(rng, word, 1);
  add_letters(d, rng, glyphs);
  auto mats = add_mats(d, rng, word.size());
  assign_cells(d, rng);
  std::sort(mats.begin(), mats.end(), [&](std::size_t l, std::size_t r) {
    return d.objects[l].cell->x < d.objects[r].cell->x;
  });
  std::vector<GoalExpr> atoms;
  for (std::size_t k = 0; k < word.size(); ++k) atoms.push_back(GoalExpr::on(letter_id(word[k]), d.objects[mats[k]].id));
  d.goal.instruction = fill(t.instruction_template, "word", word);
  d.goal.predicate = GoalExpr::conj(std::move(atoms));
}

void gen_pack_revert(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto colors = draw_colors(rng, 4);
  std::vector<std::size_t> bags;
  for (std::size_t k = 0; k < 3; ++k) {
    bags.push_back(add(d, std::string("bag_") + to_string(colors[k]), Category::misc, colors[k], "chip bag"));
  }
  add_row(d, bags);
  const std::size_t box = add(d, "box", Category::container, colors[3], "box");
  add_row(d, {box});
  d.open["box"] = true;
  const auto bag_ids = ids_of(d, bags);
  d.goal.instruction = t.instruction_template;
  d.goal.predicate = GoalExpr::count_in(bag_ids, "box", 3);
  const std::string reverted = rng.pick(bag_ids);
  DisturbanceEvent e;
  e.trigger.kind = DisturbanceTrigger::Kind::on_condition;
  e.trigger.condition = GoalExpr::conj({GoalExpr::in(reverted, "box"), GoalExpr::count_in(bag_ids, "box", 2)});
  e.action.kind = DisturbanceAction::Kind::revert;
  e.action.object = reverted;
  d.disturbances.push_back(e);
}

void gen_find_hidden(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto colors = draw_colors(rng, 6);
  const Color target = colors[0];
  const Color bowl = colors[1];
  const auto target_block = add(d, block_id(target), Category::block, target);
  const auto other_block = add(d, block_id(colors[5]), Category::block, colors[5]);
  add_row(d, {other_block});
  d.rows.back().push_back(target_block);
  add_bowls(d, {bowl});
  std::vector<std::size_t> drawers;
  for (std::size_t k = 2; k < 5; ++k) {
    drawers.push_back(add(d, std::string("drawer_") + to_string(colors[k]), Category::container, colors[k], "drawer"));
  }
  add_row(d, drawers);
  std::vector<std::string> drawer_ids = ids_of(d, drawers);
  std::sort(drawer_ids.begin(), drawer_ids.end());
  for (const auto& id : drawer_ids) d.open[id] = false;
  const std::string& hiding = drawer_ids[rng.next_below(drawer_ids.size())];
  d.relations.push_back({RelationKind::in, d.objects[target_block].id, hiding});
  d.goal.instruction = fill(fill(t.instruction_template, "color", to_string(target)), "bowl", to_string(bowl));
  d.goal.predicate = GoalExpr::in(block_id(target), bowl_id(bowl));
}

void gen_handover(Draft& d, Rng& rng, const TaskSpec& t) {
  const auto colors = draw_colors(rng, 2);
  add_blocks(d, colors);
  add(d, "person", Category::fixture, Color::gray, "person");
  d.goal.instruction = fill(t.instruction_template, "color", to_string(colors[0]));
  d.goal.predicate = GoalExpr::handed_over(block_id(colors[0]), "person");
  DisturbanceEvent e;
  e.trigger.kind = DisturbanceTrigger::Kind::after_step;
  e.trigger.step = rng.next_int(t.params.value("min_take_step", 2), t.params.value("max_take_step", 6));
  e.action.kind = DisturbanceAction::Kind::external_take;
  e.action.object = block_id(colors[0]);
  e.action.destination = "person";
  d.disturbances.push_back(e);
}

void gen_image(Draft& d, Rng& rng, const TaskSpec& t, GoalMode mode) {
  const auto colors = draw_colors(rng, 5);
  add_blocks(d, {colors[0], colors[1], colors[2]});
  add_bowls(d, {colors[3], colors[4]});
  d.goal.mode = mode;
  d.goal.instruction = t.instruction_template;
  d.random_walk_goal = true;
}

struct TaskEntry {
  TaskSpec spec;
  Generator generate;
};

TaskSpec spec(std::string id, Suite suite, Split split, std::string tmpl, json params = json::object()) {
  return TaskSpec{std::move(id), suite, split, std::move(tmpl), std::move(params)};
}

const std::vector<TaskEntry>& entries() {
  using S = Suite;
  using P = Split;
  static const std::vector<TaskEntry> all = {
      {spec("bb_block_in_bowl", S::blocks_bowls, P::seen, "put the {color} block in the matching bowl",
            {{"blocks", {2, 3}}, {"bowls", {2, 3}}}),
       gen_block_in_bowl},
      {spec("bb_matching", S::blocks_bowls, P::seen, "put all the blocks in the bowls with matching colors",
            {{"blocks", {2, 3}}, {"distractor_bowls", {0, 1}}}),
       gen_matching},
      {spec("bb_stack", S::blocks_bowls, P::seen, "stack all the blocks",
            {{"min_blocks", 3}, {"max_blocks", 4}, {"max_bowls", 2}}),
       gen_stack},
      {spec("bb_mismatched", S::blocks_bowls, P::unseen,
            "put all the blocks in the bowls with mismatched colors", {{"blocks", {2, 3}}}),
       gen_mismatched},
      {spec("bb_one_bowl", S::blocks_bowls, P::unseen, "put all the blocks in the {color} bowl",
            {{"blocks", {2, 3}}, {"bowls", 2}}),
       gen_one_bowl},
      {spec("bb_warm_stack", S::blocks_bowls, P::unseen, "stack all the blocks with warm colors",
            {{"warm", {"red", "orange", "yellow", "pink"}}, {"warm_blocks", {2, 3}}, {"cool_blocks", {1, 2}}}),
       gen_warm_stack},
      {spec("bb_sides", S::blocks_bowls, P::unseen, "put all the bowls to the left of all the blocks",
            {{"blocks", {2, 3}}, {"bowls", 2}}),
       gen_sides},
      {spec("bb_two_towers", S::blocks_bowls, P::unseen, "build two towers of equal height with the blocks",
            {{"blocks", 4}, {"bowls", {0, 1}}}),
       gen_two_towers},
      {spec("letters_alpha", S::letters, P::seen, "put the letters on the table in alphabetical order",
            {{"letters", {3, 5}}, {"max_letters", 5}}),
       [](Draft& d, Rng& r, const TaskSpec& t) { gen_alpha(d, r, t, false); }},
      {spec("letters_spell", S::letters, P::seen, "spell the word {word} from left to right",
            {{"distractors", 1}}),
       [](Draft& d, Rng& r, const TaskSpec& t) { gen_spell(d, r, t, 1, 1); }},
      {spec("letters_vowels", S::letters, P::seen, "put all the vowels in the {color} bowl",
            {{"letters", 4}, {"vowels", {1, 2}}, {"bowls", 2}}),
       gen_vowels},
      {spec("letters_reverse", S::letters, P::unseen,
            "put the letters on the table in reverse alphabetical order",
            {{"letters", {3, 4}}, {"max_letters", 4}}),
       [](Draft& d, Rng& r, const TaskSpec& t) { gen_alpha(d, r, t, true); }},
      {spec("letters_vc_sides", S::letters, P::unseen, "put the vowels to the left of the consonants",
            {{"letters", 4}, {"vowels", {1, 2}}, {"mats", 2}}),
       gen_vc_sides},
      {spec("letters_spell_subset", S::letters, P::unseen,
            "use some of the letters to spell the word {word} from left to right", {{"distractors", {2, 3}}}),
       [](Draft& d, Rng& r, const TaskSpec& t) { gen_spell(d, r, t, 2, 3); }},
      {spec("letters_word_bowl", S::letters, P::unseen, "put the letters of the word {word} in the {color} bowl",
            {{"distractors", {1, 2}}, {"bowls", 2}}),
       gen_word_bowl},
      {spec("letters_word_order", S::letters, P::unseen,
            "place the letters of the word {word} on the mats from left to right", {{"distractors", 1}}),
       gen_word_order},
      {spec("fb_stack_noisy", S::feedback, P::unseen, "stack all the blocks",
            {{"min_blocks", 3}, {"max_blocks", 3}, {"max_bowls", 0}, {"noise", 0.3}}),
       [](Draft& d, Rng& r, const TaskSpec& t) {
         gen_stack(d, r, t);
         d.noise[SkillName::pick_up] = t.params.at("noise").get<double>();
         d.noise[SkillName::place] = t.params.at("noise").get<double>();
       }},
      {spec("fb_pack_revert", S::feedback, P::unseen, "pack all the chip bags into the box",
            {{"bags", 3}, {"reverts", 1}}),
       gen_pack_revert},
      {spec("fb_find_hidden", S::feedback, P::unseen, "put the {color} block in the {bowl} bowl",
            {{"drawers", 3}}),
       gen_find_hidden},
      {spec("fb_handover", S::feedback, P::unseen, "hand the {color} block to the person",
            {{"min_take_step", 2}, {"max_take_step", 6}}),
       gen_handover},
      {spec("img_arrange", S::image_goal, P::unseen, "rearrange the objects to match the goal image",
            {{"walk", {2, 3}}}),
       [](Draft& d, Rng& r, const TaskSpec& t) { gen_image(d, r, t, GoalMode::goal_image); }},
      {spec("img_combined", S::image_goal, P::unseen,
            "arrange the blocks as shown in the goal image, blocks inside bowls stay inside",
            {{"walk", {2, 3}}}),
       [](Draft& d, Rng& r, const TaskSpec& t) { gen_image(d, r, t, GoalMode::combined); }},
  };
  return all;
}

const TaskEntry& find_entry(std::string_view id) {
  for (const auto& e : entries()) {
    if (e.spec.id == id) return e;
  }
  throw Error(ErrorKind::unknown_task, std::string(id));
}

// Random walk of pick/place pairs over blocks; the end state is the goal scene.
Scene random_walk(const Scene& start, Rng& rng, int moves) {
  const ObjectTable& table = start.table();
  const auto actions = candidate_actions(table);
  SceneState state = start.state();
  for (int m = 0; m < moves; ++m) {
    const auto visible = visibility_mask(table, state);
    std::vector<Action> picks;
    for (const Action& a : actions) {
      if (a.skill == SkillName::pick_up && table[a.a].category == Category::block &&
          check_precondition(table, state, visible, a)) {
        picks.push_back(a);
      }
    }
    if (picks.empty()) break;
    const Action pick = rng.pick(picks);
    const SceneState held = apply_effect(table, state, pick);
    std::vector<Action> places;
    for (const Action& a : actions) {
      if (a.skill == SkillName::place && a.a == pick.a &&
          state.support_of(pick.a) != Support{table.is_receptacle(a.b) ? RelationKind::in : RelationKind::on, a.b} &&
          check_precondition(table, held, visible, a)) {
        places.push_back(a);
      }
    }
    if (places.empty()) continue;
    state = apply_effect(table, held, rng.pick(places));
  }
  return start.with_state(state);
}

std::vector<ObjectDescriptor> mentioned_objects(const Scene& scene, const GoalExpr& predicate) {
  std::vector<ObjectDescriptor> out;
  for (const auto& id : predicate.referenced_ids()) out.push_back(scene.object(scene.table().index_of(id)));
  return out;
}

}  // namespace

const char* to_string(Suite s) {
  switch (s) {
    case Suite::blocks_bowls: return "BlocksBowls";
    case Suite::letters: return "Letters";
    case Suite::feedback: return "Feedback";
    case Suite::image_goal: return "ImageGoal";
  }
  return "BlocksBowls";
}

const char* to_string(Split s) { return s == Split::seen ? "seen" : "unseen"; }

std::optional<Suite> parse_suite(std::string_view text) {
  const std::string t = lower(std::string(text));
  for (auto s : {Suite::blocks_bowls, Suite::letters, Suite::feedback, Suite::image_goal}) {
    if (t == lower(to_string(s))) return s;
  }
  if (t == "blocks_bowls" || t == "blocks") return Suite::blocks_bowls;
  if (t == "image_goal" || t == "image") return Suite::image_goal;
  return std::nullopt;
}

const std::vector<TaskSpec>& task_registry() {
  static const std::vector<TaskSpec> specs = [] {
    std::vector<TaskSpec> out;
    for (const auto& e : entries()) out.push_back(e.spec);
    return out;
  }();
  return specs;
}

const TaskSpec& find_task(std::string_view id) { return find_entry(id).spec; }

std::vector<std::string> benchmark_task_ids() {
  std::vector<std::string> out;
  for (const auto& t : task_registry()) {
    if (t.suite == Suite::blocks_bowls || t.suite == Suite::letters) out.push_back(t.id);
  }
  return out;
}

std::vector<std::string> tasks_in_suite(Suite s) {
  std::vector<std::string> out;
  for (const auto& t : task_registry()) {
    if (t.suite == s) out.push_back(t.id);
  }
  return out;
}

json registry_json() {
  json out = json::array();
  for (const auto& t : task_registry()) {
    out.push_back({{"id", t.id},
                   {"suite", to_string(t.suite)},
                   {"split", to_string(t.split)},
                   {"template", t.instruction_template},
                   {"params", t.params}});
  }
  return out;
}

Episode generate_episode(std::string_view task_id, std::uint64_t seed) {
  const TaskEntry& entry = find_entry(task_id);
  Rng rng(derive_seed(entry.spec.id, seed));
  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    Draft d;
    add_table(d);
    entry.generate(d, rng, entry.spec);
    if (!d.cells_assigned) assign_cells(d, rng);
    Scene scene(d.objects, d.relations, d.open);
    GoalSpec goal = d.goal;
    if (d.random_walk_goal) {
      const Scene target = random_walk(scene, rng, rng.next_int(2, 3));
      std::vector<std::string> blocks;
      for (const auto& o : scene.objects()) {
        if (o.category == Category::block) blocks.push_back(o.id);
      }
      goal.goal_scene = target;
      goal.goal_image = render_image(target, RenderStyle::goal_sketch);
      goal.relevant = blocks;
      goal.predicate = relational_match(target, blocks);
    }
    if (goal.relevant.empty()) goal.relevant = goal.predicate.referenced_ids();
    goal.mentioned = mentioned_objects(scene, goal.predicate);
    if (goal_satisfied(scene, goal)) continue;
    if (!oracle_solve(scene, goal)) continue;

    Episode ep;
    ep.task_id = entry.spec.id;
    ep.seed = seed;
    ep.scene = std::move(scene);
    ep.goal = std::move(goal);
    ep.disturbances = std::move(d.disturbances);
    ep.noise = std::move(d.noise);
    ep.rng_seed = derive_seed("sim/" + entry.spec.id, seed);
    return ep;
  }
  throw Error(ErrorKind::generation_failed,
              entry.spec.id + " seed " + std::to_string(seed) + ": no solvable instance");
}

std::vector<Episode> feedback_scenarios(std::uint64_t seed) {
  std::vector<Episode> out;
  for (const auto& id : tasks_in_suite(Suite::feedback)) out.push_back(generate_episode(id, seed));
  return out;
}

void set_manipulation_noise(Episode& episode, double p) {
  episode.noise[SkillName::pick_up] = p;
  episode.noise[SkillName::place] = p;
}

json to_json(const DisturbanceEvent& e) {
  json trigger;
  if (e.trigger.kind == DisturbanceTrigger::Kind::after_step) {
    trigger = {{"kind", "after_step"}, {"step", e.trigger.step}};
  } else {
    trigger = {{"kind", "on_condition"}, {"condition", to_json(e.trigger.condition)}};
  }
  static const char* kActions[] = {"none", "relocate", "revert", "external_take"};
  json action = {{"kind", kActions[static_cast<int>(e.action.kind)]}, {"object", e.action.object}};
  if (!e.action.destination.empty()) action["destination"] = e.action.destination;
  if (e.action.kind == DisturbanceAction::Kind::relocate) action["relation"] = to_string(e.action.relation);
  return {{"trigger", trigger}, {"action", action}};
}

DisturbanceEvent disturbance_from_json(const json& j) {
  DisturbanceEvent e;
  const auto& trigger = j.at("trigger");
  if (trigger.at("kind") == "after_step") {
    e.trigger.kind = DisturbanceTrigger::Kind::after_step;
    e.trigger.step = trigger.at("step").get<int>();
  } else if (trigger.at("kind") == "on_condition") {
    e.trigger.kind = DisturbanceTrigger::Kind::on_condition;
    e.trigger.condition = goal_from_json(trigger.at("condition"));
  } else {
    throw Error(ErrorKind::config_error, "unknown trigger kind");
  }
  const auto& action = j.at("action");
  const std::string kind = action.at("kind").get<std::string>();
  if (kind == "none") {
    e.action.kind = DisturbanceAction::Kind::none;
  } else if (kind == "relocate") {
    e.action.kind = DisturbanceAction::Kind::relocate;
  } else if (kind == "revert") {
    e.action.kind = DisturbanceAction::Kind::revert;
  } else if (kind == "external_take") {
    e.action.kind = DisturbanceAction::Kind::external_take;
  } else {
    throw Error(ErrorKind::config_error, "unknown disturbance action " + kind);
  }
  e.action.object = action.value("object", "");
  e.action.destination = action.value("destination", "");
  e.action.relation = action.value("relation", "on") == "in" ? RelationKind::in : RelationKind::on;
  return e;
}

json to_json(const Episode& e) {
  json disturbances = json::array();
  for (const auto& d : e.disturbances) disturbances.push_back(to_json(d));
  json noise = json::object();
  for (const auto& [skill, p] : e.noise) noise[to_string(skill)] = p;
  return {{"task_id", e.task_id}, {"seed", e.seed},   {"rng_seed", e.rng_seed},
          {"scene", to_json(e.scene)}, {"goal", to_json(e.goal)}, {"disturbances", disturbances},
          {"noise", noise}};
}

Episode episode_from_json(const json& j) {
  Episode e;
  e.task_id = j.at("task_id").get<std::string>();
  e.seed = j.value("seed", std::uint64_t{0});
  e.rng_seed = j.value("rng_seed", std::uint64_t{0});
  e.scene = scene_from_json(j.at("scene"));
  e.goal = goal_spec_from_json(j.at("goal"));
  if (j.contains("disturbances")) {
    for (const auto& d : j["disturbances"]) e.disturbances.push_back(disturbance_from_json(d));
  }
  if (j.contains("noise")) {
    for (const auto& [name, p] : j["noise"].items()) {
      const auto skill = parse_skill_name(name);
      if (!skill) throw Error(ErrorKind::config_error, "unknown skill in noise: " + name);
      e.noise[*skill] = p.get<double>();
    }
  }
  if (e.goal.mentioned.empty()) e.goal.mentioned = mentioned_objects(e.scene, e.goal.predicate);
  if (e.goal.relevant.empty()) e.goal.relevant = e.goal.predicate.referenced_ids();
  return e;
}

}  // namespace planbench
