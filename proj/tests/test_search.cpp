#include <gtest/gtest.h>

#include "oracle.hpp"
#include "support.hpp"

using namespace talespin;
using testing_support::aviation;
using testing_support::T;

namespace {

const Term kGoal = T("plocation(passengers1,gate(dallas))");

std::vector<EventDef> antagonist(const char* file) { return testing_support::load_kb(file, false).events; }

}  // namespace

TEST(Forward, SatisfiedAtRoot) {
  EXPECT_TRUE(forward_search(aviation().init, T("p_on_ground(passengers1)"), aviation()).empty());
}

TEST(Forward, NominalAtDepthEight) {
  auto plan = forward_search(aviation().init, kGoal, aviation(), {8});
  auto best = make_best_plan(kGoal, aviation().init, aviation());
  EXPECT_EQ(plan.actions(), best.plan.actions());
  auto end = replay_plan(plan, aviation().init, aviation().rules);
  ASSERT_TRUE(end);
  EXPECT_TRUE(holds(kGoal, *end, aviation().rules));
}

TEST(Forward, TooShallow) { EXPECT_THROW(forward_search(aviation().init, kGoal, aviation(), {2}), NoPlanFound); }

TEST(Forward, UninformedEvaluationStillSolves) {
  auto plan = forward_search(aviation().init, kGoal, aviation(), {8, "goal_test"});
  EXPECT_EQ(plan.size(), 8u);
  auto end = replay_plan(plan, aviation().init, aviation().rules);
  ASSERT_TRUE(end);
  EXPECT_TRUE(holds(kGoal, *end, aviation().rules));
  EXPECT_THROW(forward_search(aviation().init, kGoal, aviation(), {8, "vibes"}), UnknownEvaluation);
}

TEST(Forward, NominalPlanIsAForwardSolution) {
  auto best = make_best_plan(kGoal, aviation().init, aviation());
  bool found = false;
  for (const auto& seq : oracle::forward_solutions(aviation().init, kGoal, aviation(), 8))
    found = found || seq == best.plan.actions();
  EXPECT_TRUE(found);
}

TEST(Forward, ResultsReplayFromManyStarts) {
  // Start from every situation along the nominal flight, with and without fire.
  auto tr = [] {
    SimConfig cfg;
    cfg.happening_prob = 0;
    return generate_incident(aviation(), cfg);
  }();
  for (const auto& st : tr.steps) {
    for (const char* g : {"p_on_ground(passengers1)", "plocation(passengers1,gate(dallas))",
                          "alocation(airplane1,gate(chicago))"}) {
      try {
        auto plan = forward_search(st.pre, T(g), aviation(), {8});
        auto end = replay_plan(plan, st.pre, aviation().rules);
        ASSERT_TRUE(end) << g;
        EXPECT_TRUE(holds(T(g), *end, aviation().rules));
      } catch (const NoPlanFound&) {
        EXPECT_TRUE(enumerate_plans(T(g), st.pre, aviation(), {8, "constant"}).empty()) << g;
      }
    }
  }
}

TEST(Adversarial, NoApplicableAntagonistEqualsSoloPlan) {
  EventDef never;
  never.kind = EventKind::Action;
  never.head = T("meddle");
  never.pcs = {T("never_true")};
  auto tr = adversarial_story(aviation(), kGoal, {never});
  auto solo = forward_search(aviation().init, kGoal, aviation());
  ASSERT_EQ(tr.steps.size(), solo.size());
  for (std::size_t i = 0; i < solo.size(); ++i) EXPECT_EQ(tr.steps[i].term(), solo.steps[i].action());
}

TEST(Adversarial, NoOpAntagonistInterleaves) {
  auto tr = adversarial_story(aviation(), kGoal, antagonist("noop.kb"), {16});
  auto solo = forward_search(aviation().init, kGoal, aviation());
  ASSERT_EQ(tr.steps.size(), 2 * solo.size() - 1);
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    if (i % 2 == 0) {
      EXPECT_EQ(tr.steps[i].term(), solo.steps[i / 2].action());
    } else {
      EXPECT_EQ(tr.steps[i].term(), T("idle"));
      EXPECT_EQ(tr.steps[i].kind(), EventKind::Happening);
    }
  }
  EXPECT_EQ(tr.final_situation(), replay_plan(solo, aviation().init, aviation().rules));
}

TEST(Adversarial, SaboteurScenario) {
  auto kb = testing_support::load_kb("adversarial.kb");
  auto sab = antagonist("saboteur.kb");
  auto tr = adversarial_story(kb, *kb.goal, sab, {12});
  auto world = adversarial_world(kb, sab);
  std::vector<std::string> got;
  std::vector<int> eval;
  for (const auto& st : tr.steps) {
    got.push_back(st.term().str());
    eval.push_back(evaluate_situation(st.post, *kb.goal, world, "plan_distance", 12));
  }
  EXPECT_EQ(got, (std::vector<std::string>{
                     "load(passengers1,airplane1)", "ignite(airplane1)", "repair(airplane1)",
                     "taxi_to_runway(airplane1)", "take_off(airplane1,seattle)", "cruise(airplane1,seattle,chicago)",
                     "cruise(airplane1,chicago,dallas)", "land(airplane1,dallas)", "taxi_to_gate(airplane1)",
                     "unload(passengers1,airplane1)"}));
  EXPECT_EQ(eval, (std::vector<int>{-7, -8, -7, -6, -5, -4, -3, -2, -1, 0}));
  EXPECT_EQ(render_event(tr.steps[1].event, world), "A saboteur set the engine on fire.");
}

TEST(Adversarial, Stalemate) {
  auto kb = testing_support::load_kb("adversarial.kb");
  EXPECT_THROW(adversarial_story(kb, *kb.goal, antagonist("saboteur.kb"), {8}), Stalemate);
}

TEST(Adversarial, OverlapRejected) {
  EventDef load = aviation().events.front();
  EXPECT_THROW(adversarial_story(aviation(), kGoal, {load}), Error);
}
