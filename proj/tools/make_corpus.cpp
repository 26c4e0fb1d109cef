#include <fstream>
#include <iostream>

#include "planbench/oracle.hpp"
#include "planbench/plan_language.hpp"
#include "planbench/tasks.hpp"

using namespace planbench;

namespace {

json invocation_json(const SkillInvocation& inv) { return {{"skill", to_string(inv.skill)}, {"args", inv.args}}; }

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_corpus OUT.json\n";
    return 2;
  }
  json scenes = json::array();
  for (const auto& task : task_registry()) {
    const Episode ep = generate_episode(task.id, 0);
    const ObjectTable& table = ep.scene.table();
    json vocab = json::array();
    for (const auto& d : table.objects()) vocab.push_back(to_json(d));
    json steps = json::array();
    for (const auto& a : candidate_actions(table)) {
      steps.push_back({{"text", format_action(a, table)}, {"expected", invocation_json(unbind(table, a))}});
    }
    json plans = json::array();
    if (const auto plan = oracle_solve(ep.scene, ep.goal)) {
      json expected = json::array();
      for (const auto& s : plan->steps) expected.push_back(invocation_json(s));
      plans.push_back({{"text", "Plan:\n" + format_plan(*plan, table)},
                       {"expected", {{"steps", expected}, {"terminated", plan->terminated}}}});
    }
    scenes.push_back({{"task_id", task.id}, {"vocabulary", vocab}, {"steps", steps}, {"plans", plans}});
  }
  std::ofstream out(argv[1]);
  out << json{{"version", 1}, {"scenes", scenes}}.dump(1) << "\n";
  return out ? 0 : 1;
}
