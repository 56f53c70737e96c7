#include "splitnet/splitter.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "splitter_oracle.hpp"

namespace {

using splitnet::Access;
using splitnet::AtomicSplitter;
using splitnet::Outcome;
using splitnet::Phase;
using splitnet::ProcessId;
using splitnet::Register;
using splitnet::RegisterValue;
using splitnet::SplitterState;
using splitnet::StepCursor;

// Drives one process one access forward, returning the event.
splitnet::RegisterEvent advance(SplitterState& s, StepCursor& c, ProcessId pid) {
  auto [next, ev] = splitnet::step(s, c, pid);
  c = next;
  return ev;
}

TEST(SplitterTest, FreshStateIsEmpty) {
  SplitterState s = splitnet::new_splitter();
  EXPECT_FALSE(s.x.has_value());
  EXPECT_FALSE(s.y);
}

TEST(SplitterTest, SplittersAreIndependent) {
  SplitterState a = splitnet::new_splitter();
  SplitterState b = splitnet::new_splitter();
  StepCursor c;
  while (!c.done()) advance(a, c, 3);
  EXPECT_EQ(b, splitnet::new_splitter());
  EXPECT_EQ(a.x, ProcessId{3});
  EXPECT_TRUE(a.y);
}

TEST(SplitterTest, SoloProcessStopsAfterFourAccesses) {
  SplitterState s;
  StepCursor c;
  std::vector<splitnet::RegisterEvent> events;
  while (!c.done()) events.push_back(advance(s, c, 0));
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(c.outcome, Outcome::kStop);
  EXPECT_TRUE(s.y);

  EXPECT_EQ(events[0].phase, Phase::kWriteX);
  EXPECT_EQ(events[0].reg, Register::kX);
  EXPECT_EQ(events[0].op, Access::kWrite);
  EXPECT_EQ(events[1].phase, Phase::kReadY);
  EXPECT_EQ(events[1].value, RegisterValue{false});
  EXPECT_EQ(events[2].phase, Phase::kWriteY);
  EXPECT_EQ(events[3].phase, Phase::kReadX);
  EXPECT_EQ(events[3].value, RegisterValue{ProcessId{0}});
}

TEST(SplitterTest, OverwrittenXSendsDown) {
  // p writes X, q writes X, p reads Y (false), p writes Y, p reads X (= q).
  SplitterState s;
  StepCursor p, q;
  advance(s, p, 1);
  advance(s, q, 2);
  EXPECT_EQ(advance(s, p, 1).value, RegisterValue{false});
  advance(s, p, 1);
  EXPECT_EQ(advance(s, p, 1).value, RegisterValue{ProcessId{2}});
  ASSERT_TRUE(p.done());
  EXPECT_EQ(p.outcome, Outcome::kDown);
}

TEST(SplitterTest, LateArrivalSeesYAndGoesRight) {
  SplitterState s;
  StepCursor p, q;
  advance(s, p, 1);
  advance(s, p, 1);
  advance(s, p, 1);  // p has written Y
  advance(s, q, 2);
  EXPECT_EQ(advance(s, q, 2).value, RegisterValue{true});
  ASSERT_TRUE(q.done());
  EXPECT_EQ(q.outcome, Outcome::kRight);
  // p was overwritten by q's WriteX.
  advance(s, p, 1);
  EXPECT_EQ(p.outcome, Outcome::kDown);
}

TEST(SplitterTest, StepOnDoneCursorIsAnError) {
  SplitterState s;
  StepCursor c = StepCursor::finished(Outcome::kStop);
  EXPECT_THROW(splitnet::step(s, c, 0), splitnet::ContractViolation);
}

TEST(SplitterTest, ReadOfEmptyXMatchesNoPid) {
  SplitterState s;
  StepCursor c{Phase::kReadX};
  auto [next, ev] = splitnet::step(s, c, 0);
  EXPECT_TRUE(std::holds_alternative<std::monostate>(ev.value));
  EXPECT_EQ(next.outcome, Outcome::kDown);
}

TEST(SplitterTest, RunSoloAlwaysStops) {
  EXPECT_EQ(splitnet::run_solo(0), Outcome::kStop);
  EXPECT_EQ(splitnet::run_solo(7), Outcome::kStop);
  EXPECT_EQ(splitnet::run_solo(0xfffffffeu), Outcome::kStop);
}

TEST(SplitterTest, YNeverGoesBackToFalse) {
  auto tally = oracle::enumerate_splitter(2, /*record=*/true);
  for (const auto& sched : tally.schedules) {
    SplitterState s;
    std::vector<StepCursor> c(2);
    bool seen_true = false;
    for (int pid : sched) {
      advance(s, c[pid], static_cast<ProcessId>(pid));
      if (seen_true) {
        ASSERT_TRUE(s.y);
      }
      seen_true = s.y;
    }
  }
}

// The oracle's interleaving counts, frozen: 54 of the C(8,4) = 70 orderings
// survive early Right exits for p = 2; 11862 of 12!/(4!)^3 = 34650 for p = 3.
TEST(SplitterOracleTest, InterleavingCounts) {
  EXPECT_EQ(oracle::enumerate_splitter(1).interleavings, 1u);
  EXPECT_EQ(oracle::enumerate_splitter(2).interleavings, 54u);
  EXPECT_EQ(oracle::enumerate_splitter(3).interleavings, 11862u);
  EXPECT_EQ(oracle::enumerate_splitter(2).outcome_vectors.size(), 6u);
  EXPECT_EQ(oracle::enumerate_splitter(3).outcome_vectors.size(), 18u);
}

// Replays every oracle interleaving through splitnet::step and compares
// outcomes, then asserts the three splitter properties on each.
class SplitterExhaustiveTest : public ::testing::TestWithParam<int> {};

TEST_P(SplitterExhaustiveTest, MatchesOracleAndHoldsProperties) {
  const int p = GetParam();
  auto tally = oracle::enumerate_splitter(p, /*record=*/true);
  ASSERT_EQ(tally.schedules.size(), tally.interleavings);
  for (std::size_t k = 0; k < tally.schedules.size(); ++k) {
    SplitterState s;
    std::vector<StepCursor> c(p);
    for (int pid : tally.schedules[k]) advance(s, c[pid], static_cast<ProcessId>(pid));
    std::string got;
    for (const auto& cursor : c) {
      ASSERT_TRUE(cursor.done());
      got += cursor.outcome == Outcome::kStop ? 'S' : cursor.outcome == Outcome::kRight ? 'R' : 'D';
    }
    ASSERT_EQ(got, tally.outcomes_per_schedule[k]);

    const auto stops = std::count(got.begin(), got.end(), 'S');
    EXPECT_LE(stops, 1);
    if (p == 1) {
      EXPECT_EQ(got, "S");
    }
    if (p >= 2) {
      EXPECT_NE(got.find_first_of("SR"), std::string::npos);
      EXPECT_NE(got.find_first_of("SD"), std::string::npos);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Processes, SplitterExhaustiveTest, ::testing::Values(1, 2, 3));

TEST(AtomicSplitterTest, SoloVisitStops) {
  AtomicSplitter s;
  EXPECT_EQ(s.visit(5), Outcome::kStop);
  EXPECT_EQ(s.visit(6), Outcome::kRight);
}

TEST(AtomicSplitterTest, AtMostOneStopUnderContention) {
  for (int round = 0; round < 200; ++round) {
    AtomicSplitter s;
    constexpr int kThreads = 8;
    std::vector<Outcome> out(kThreads);
    std::vector<std::thread> threads;
    for (int i = 0; i < kThreads; ++i) {
      threads.emplace_back([&, i] { out[i] = s.visit(static_cast<ProcessId>(i), [] { std::this_thread::yield(); }); });
    }
    for (auto& t : threads) t.join();
    const auto stops = std::count(out.begin(), out.end(), Outcome::kStop);
    const auto rights = std::count(out.begin(), out.end(), Outcome::kRight);
    const auto downs = std::count(out.begin(), out.end(), Outcome::kDown);
    ASSERT_LE(stops, 1);
    ASSERT_LT(rights, kThreads);
    ASSERT_LT(downs, kThreads);
  }
}

}  // namespace
