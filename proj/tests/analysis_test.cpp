#include "splitnet/analysis.hpp"

#include "gtest/gtest.h"
#include "splitnet/topology_io.hpp"

namespace {

using splitnet::Outcome;
using splitnet::Policy;
using splitnet::ProcessId;
using splitnet::RegionKind;
using splitnet::Topology;
using splitnet::Trace;
using splitnet::ViolationKind;

constexpr Policy kPolicies[] = {Policy::kRoundRobin, Policy::kRandom, Policy::kAdversary};

const splitnet::Region& first_grid(const Topology& t) {
  for (const auto& r : t.regions()) {
    if (r.kind == RegionKind::kGrid) return r;
  }
  throw std::logic_error("no grid");
}

// Register events for one uncontended visit ending in Stop.
void solo_visit(Trace& trace, ProcessId pid, splitnet::NodeId node) {
  splitnet::SplitterState s;
  splitnet::StepCursor c;
  while (!c.done()) {
    auto [next, ev] = splitnet::step(s, c, pid, node);
    ev.node = node;
    trace.events.emplace_back(ev);
    c = next;
  }
  trace.events.emplace_back(splitnet::OutcomeEvent{pid, node, c.outcome, splitnet::WireTarget::exit()});
}

TEST(SplitterCheckTest, EngineTracesAreClean) {
  for (const Topology& t : {splitnet::build_grid(1), splitnet::build_grid(5), splitnet::build_tree(7),
                            splitnet::build_stage(9), splitnet::build_full(9), splitnet::build_adaptive(8)}) {
    for (Policy p : kPolicies) {
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        for (std::uint32_t procs : {1u, 2u, 5u, 9u}) {
          auto run = splitnet::simulate(t, procs, p, seed);
          ASSERT_TRUE(splitnet::check_splitter_properties(run.trace).empty());
          ASSERT_TRUE(splitnet::check_register_semantics(run.trace).empty());
          ASSERT_TRUE(splitnet::check_bounds(run.trace, t).empty());
        }
      }
    }
  }
}

TEST(SplitterCheckTest, TwoStopsAtOneNode) {
  Trace forged;
  forged.header.processes = 2;
  solo_visit(forged, 0, 0);
  solo_visit(forged, 1, 0);
  auto v = splitnet::check_splitter_properties(forged);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kSplitterProperty);
  EXPECT_EQ(v[0].location, "node 0");
  EXPECT_EQ(v[0].schedule_prefix.size(), 8u);
}

TEST(SplitterCheckTest, SoloTraceStops) {
  Topology t = splitnet::build_grid(3);
  auto run = splitnet::simulate(t, 1, Policy::kRandom, 0);
  EXPECT_TRUE(splitnet::check_splitter_properties(run.trace).empty());
  auto ledger = splitnet::build_ledger(run.trace);
  ASSERT_EQ(ledger.size(), 1u);
  ASSERT_EQ(ledger[0].completions.size(), 1u);
  EXPECT_EQ(ledger[0].completions[0].second, Outcome::kStop);
}

TEST(SplitterCheckTest, SoloNonStopAndOneSidedSplits) {
  Trace solo;
  solo.header.processes = 1;
  solo_visit(solo, 0, 0);
  std::get<splitnet::OutcomeEvent>(solo.events.back()).outcome = Outcome::kDown;
  ASSERT_EQ(splitnet::check_splitter_properties(solo).size(), 1u);
  EXPECT_FALSE(splitnet::check_register_semantics(solo).empty());

  Trace pair;
  pair.header.processes = 2;
  solo_visit(pair, 0, 0);
  solo_visit(pair, 1, 0);
  std::get<splitnet::OutcomeEvent>(pair.events[4]).outcome = Outcome::kRight;
  std::get<splitnet::OutcomeEvent>(pair.events[9]).outcome = Outcome::kRight;
  auto v = splitnet::check_splitter_properties(pair);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].detail.find("Right"), std::string::npos);
}

TEST(SplitterCheckTest, TamperedReadIsCaught) {
  auto run = splitnet::simulate(splitnet::build_grid(2), 2, Policy::kRoundRobin, 0);
  auto& ev = std::get<splitnet::RegisterEvent>(run.trace.events[2]);
  ASSERT_EQ(ev.phase, splitnet::Phase::kReadY);
  ev.value = true;
  EXPECT_FALSE(splitnet::check_register_semantics(run.trace).empty());
}

TEST(GridInequalityTest, VacuousWhenEveryoneStops) {
  Topology t = splitnet::build_grid(6);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto run = splitnet::simulate(t, 6, Policy::kRandom, seed);
    auto g = splitnet::grid_outputs(run.trace, t, first_grid(t));
    EXPECT_EQ(g.stopped, 6u);
    EXPECT_EQ(g.left, 0u);
    EXPECT_TRUE(splitnet::check_lemma1(run.trace, t, first_grid(t)).empty());
  }
}

TEST(GridInequalityTest, SevenProcessesOnSideSix) {
  Topology t = splitnet::build_grid(6);
  for (Policy p : kPolicies) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      auto run = splitnet::simulate(t, 7, p, seed);
      auto g = splitnet::grid_outputs(run.trace, t, first_grid(t));
      ASSERT_EQ(g.entrants, 7u);
      if (g.stopped < 7) {
        ASSERT_GE(g.nonempty_output_wires + g.stopped, 7u);
        ASSERT_GE(g.nonempty_output_splitters + g.stopped, 6u);
      }
      ASSERT_TRUE(splitnet::check_lemma1(run.trace, t, first_grid(t)).empty());
    }
  }
}

TEST(GridInequalityTest, TwentyProcessesOnSideSix) {
  Topology t = splitnet::build_grid(6);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto run = splitnet::simulate(t, 20, Policy::kRandom, seed);
    auto g = splitnet::grid_outputs(run.trace, t, first_grid(t));
    ASSERT_GT(g.left, 0u);
    ASSERT_LE(g.nonempty_output_wires, 12u);
    ASSERT_GE(g.nonempty_output_splitters + g.stopped, 6u);
    ASSERT_TRUE(splitnet::check_lemma1(run.trace, t, first_grid(t)).empty());
  }
}

TEST(GridInequalityTest, RejectsTreesAndUnfinishedGrids) {
  Topology tree = splitnet::build_tree(3);
  auto run = splitnet::simulate(tree, 2, Policy::kRandom, 0);
  EXPECT_THROW(splitnet::check_lemma1(run.trace, tree, tree.regions()[0]), splitnet::AnalysisError);

  Topology grid = splitnet::build_grid(3);
  auto partial = splitnet::replay(grid, std::vector<ProcessId>{0, 1, 0}, 2);
  EXPECT_THROW(splitnet::check_lemma1(partial.trace, grid, first_grid(grid)), splitnet::AnalysisError);
  EXPECT_TRUE(splitnet::check_all(partial.trace, grid).empty());
}

TEST(GridInequalityTest, BrokenGridIsReported) {
  // Side-2 grid whose corner sends Right straight out of the network.
  Topology good = splitnet::build_grid(2);
  auto nodes = good.nodes();
  nodes[0].right = splitnet::WireTarget::exit();
  Topology broken(nodes, 0, good.meta());
  // 0 stops at the corner, 1 sees Y set and leaves Right.
  auto run = splitnet::replay(broken, std::vector<ProcessId>{0, 0, 0, 0, 1, 1});
  auto v = splitnet::check_lemma1(run.trace, broken, first_grid(broken));
  // One wire plus one stop falls short of m + 1; the splitter count still holds.
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kLemma1Wires);
  auto again = splitnet::replay(broken, v[0].schedule_prefix, 2);
  EXPECT_EQ(splitnet::check_lemma1(again.trace, broken, first_grid(broken)).size(), 1u);
}

TEST(BlockerCheckTest, TreeOfThree) {
  Topology t = splitnet::build_tree(3);
  for (Policy p : kPolicies) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto run = splitnet::simulate(t, 3, p, seed);
      ASSERT_GE(run.result.finished_count(), 1u);
      ASSERT_TRUE(splitnet::check_blockers(run.trace, t).empty());
    }
  }
}

TEST(BlockerCheckTest, StageOfNine) {
  Topology t = splitnet::build_stage(9);
  for (Policy p : kPolicies) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto run = splitnet::simulate(t, 9, p, seed);
      ASSERT_GE(run.result.stops_per_stage[0], 3u);
      ASSERT_TRUE(splitnet::check_blockers(run.trace, t).empty());
    }
  }
}

TEST(BlockerCheckTest, FullSixteen) {
  Topology t = splitnet::build_full(16);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto run = splitnet::simulate(t, 16, Policy::kRandom, seed);
    ASSERT_EQ(run.result.overflow_count(), 0u);
    ASSERT_TRUE(splitnet::check_all(run.trace, t).empty());
  }
}

TEST(BlockerCheckTest, UnlabelledTopologyRejected) {
  std::vector<splitnet::Node> nodes(1);
  Topology bare(nodes, 0);
  auto run = splitnet::simulate(bare, 1, Policy::kRandom, 0);
  EXPECT_THROW(splitnet::check_blockers(run.trace, bare), splitnet::AnalysisError);
  EXPECT_TRUE(splitnet::check_all(run.trace, bare).empty());
}

TEST(BlockerCheckTest, OverloadedNetworkOverflowIsExpected) {
  // More entrants than the design bound: overflow is allowed and not flagged.
  Topology t = splitnet::build_full(1);
  bool overflowed = false;
  for (std::uint64_t seed = 0; seed < 200 && !overflowed; ++seed) {
    auto run = splitnet::simulate(t, 8, Policy::kRandom, seed);
    overflowed = run.result.overflow_count() > 0;
    for (const auto& v : splitnet::check_blockers(run.trace, t)) {
      EXPECT_NE(v.kind, ViolationKind::kNetworkOverflow);
    }
  }
  EXPECT_TRUE(overflowed);
}

TEST(MetricsTest, SoloRun) {
  Topology t = splitnet::build_full(9);
  auto run = splitnet::simulate(t, 1, Policy::kRandom, 0);
  auto m = splitnet::compute_metrics(run.trace, t);
  EXPECT_EQ(m.per_process_visits.at(0), 1u);
  EXPECT_EQ(m.per_process_register_ops.at(0), 4u);
  EXPECT_EQ(m.max_name, t.entry());
  EXPECT_EQ(m.finished, 1u);
  EXPECT_EQ(m.stops_per_stage.at(0), 1u);
}

TEST(MetricsTest, FullNineBounds) {
  Topology t = splitnet::build_full(9);
  const std::uint32_t bound = 3 * (2 * 3 + splitnet::ceil_log2(9));
  for (Policy p : kPolicies) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto run = splitnet::simulate(t, 9, p, seed);
      auto m = splitnet::compute_metrics(run.trace, t);
      ASSERT_EQ(m.names_assigned.size(), 9u);
      ASSERT_LE(*m.max_name, 116u);
      for (const auto& [pid, visits] : m.per_process_visits) {
        ASSERT_LE(visits, bound);
        ASSERT_LE(visits, splitnet::validate(t).depth);
        ASSERT_EQ(visits, run.result.visits[pid]);
        ASSERT_EQ(m.per_process_register_ops.at(pid), run.result.register_ops[pid]);
      }
      ASSERT_EQ(m.stops_per_stage, run.result.stops_per_stage);
      ASSERT_FALSE(m.grids.empty());
    }
  }
}

TEST(ResultCheckTest, DuplicatesAndOverflow) {
  Topology t = splitnet::build_full(4);
  auto run = splitnet::simulate(t, 4, Policy::kRandom, 0);
  EXPECT_TRUE(splitnet::check_result(run.result, t).empty());
  auto forged = run.result;
  forged.status[1] = forged.status[0];
  forged.status[2] = {splitnet::ProcessStatus::Kind::kOverflowed, 0};
  auto v = splitnet::check_result(forged, t);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ViolationKind::kDuplicateName);
  EXPECT_EQ(v[1].kind, ViolationKind::kNetworkOverflow);
  EXPECT_EQ(splitnet::design_capacity(splitnet::build_adaptive(5)), 8u);
}

TEST(TraceIoTest, RoundTrip) {
  for (Policy p : kPolicies) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto run = splitnet::simulate(splitnet::build_full(9), 9, p, seed);
      const std::string text = splitnet::write_trace(run.trace);
      EXPECT_EQ(splitnet::read_trace(text), run.trace);
    }
  }
  const std::vector<ProcessId> schedule{0, 3, 1, 1};
  EXPECT_EQ(splitnet::read_schedule(splitnet::write_schedule(schedule)), schedule);
}

TEST(TraceIoTest, EventShape) {
  auto run = splitnet::simulate(splitnet::build_grid(1), 1, Policy::kRandom, 9);
  const std::string text = splitnet::write_trace(run.trace);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            R"({"splitnet_trace":1,"topology_hash":")" + splitnet::topology_hash(splitnet::build_grid(1)) +
                R"(","processes":1,"policy":"random","seed":9})");
  EXPECT_NE(text.find(R"({"pid":0,"node":0,"phase":"write_x","register":"X","op":"write","value":0})"),
            std::string::npos);
  EXPECT_NE(text.find(R"({"pid":0,"node":0,"phase":"read_y","register":"Y","op":"read","value":false})"),
            std::string::npos);
  EXPECT_NE(text.find(R"({"pid":0,"node":0,"outcome":"stop"})"), std::string::npos);
}

TEST(TraceIoTest, MalformedLinesAreNumbered) {
  const std::string header = R"({"splitnet_trace":1,"topology_hash":"x","processes":1,"policy":"random","seed":0})";
  try {
    splitnet::read_trace(header + "\n" + R"({"pid":0,"node":0,"outcome":"stop"})" + "\n{oops\n");
    FAIL();
  } catch (const splitnet::FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    splitnet::read_trace(header + "\n" + R"({"pid":0,"node":0,"phase":"jump","register":"X","op":"write","value":0})");
    FAIL();
  } catch (const splitnet::FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(splitnet::read_trace(R"({"pid":0})"), splitnet::FormatError);
  EXPECT_THROW(splitnet::read_trace(""), splitnet::FormatError);
  EXPECT_THROW(splitnet::read_schedule("{\"a\":1}"), splitnet::FormatError);
}

}  // namespace
