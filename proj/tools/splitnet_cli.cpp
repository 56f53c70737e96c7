#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "splitnet/analysis.hpp"
#include "splitnet/explore.hpp"
#include "splitnet/report.hpp"
#include "splitnet/topology_io.hpp"

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

// Input problems that are the caller's fault; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write " + path);
}

void print(const ojson& j) { std::cout << j.dump(2) << "\n"; }

struct BuildArgs {
  std::string kind;
  std::optional<std::uint32_t> m, n, size;
  std::string out, dot;
  bool per_wire = false;
};

int cmd_build(const BuildArgs& a) {
  const int given = a.m.has_value() + a.n.has_value() + a.size.has_value();
  if (given != 1) throw UsageError("give exactly one of --m, --n, --size");
  const std::uint32_t size = a.m ? *a.m : a.n ? *a.n : *a.size;
  splitnet::StageOptions options;
  if (a.per_wire) options.attachment = splitnet::TreeAttachment::kPerWire;

  std::optional<splitnet::Topology> t;
  if (a.kind == "grid") {
    t = splitnet::build_grid(size);
  } else if (a.kind == "tree") {
    t = splitnet::build_tree(size);
  } else if (a.kind == "stage") {
    t = splitnet::build_stage(size, options);
  } else if (a.kind == "full") {
    t = splitnet::build_full(size, options);
  } else {
    t = splitnet::build_adaptive(size, options);
  }
  const auto report = splitnet::validate(*t);
  if (!a.out.empty()) write_file(a.out, splitnet::export_topology(*t, splitnet::ExportFormat::kJson));
  if (!a.dot.empty()) write_file(a.dot, splitnet::export_topology(*t, splitnet::ExportFormat::kDot));
  ojson j;
  j["kind"] = a.kind;
  j["size"] = size;
  j["topology_hash"] = splitnet::topology_hash(*t);
  j.update(splitnet::to_json(report));
  print(j);
  return kPass;
}

splitnet::Topology load_topology(const std::string& path) {
  splitnet::Topology t = splitnet::import_topology(read_file(path));
  splitnet::validate(t);
  return t;
}

struct RunArgs {
  std::string topo;
  std::uint32_t procs = 1;
  std::string sched = "round_robin";
  std::uint64_t seed = 0;
  std::string trace_out, schedule, schedule_out;
};

int cmd_run(const RunArgs& a) {
  const splitnet::Topology t = load_topology(a.topo);
  const auto policy = splitnet::policy_from_string(a.sched);
  if (!policy) throw UsageError("unknown --sched " + a.sched);

  splitnet::Run run;
  if (*policy == splitnet::Policy::kReplay) {
    if (a.schedule.empty()) throw UsageError("--sched replay needs --schedule");
    const auto schedule = splitnet::read_schedule(read_file(a.schedule));
    run = splitnet::replay(t, schedule, a.procs);
  } else {
    if (!a.schedule.empty()) throw UsageError("--schedule only applies to --sched replay");
    run = splitnet::simulate(t, a.procs, *policy, a.seed);
  }
  if (!a.trace_out.empty()) write_file(a.trace_out, splitnet::write_trace(run.trace));

  const auto violations = splitnet::check_all(run.trace, t);
  ojson j;
  j["seed"] = a.seed;
  j["policy"] = a.sched;
  j["procs"] = a.procs;
  j["topology_hash"] = splitnet::topology_hash(t);
  j["steps"] = run.trace.schedule().size();
  j["metrics"] = splitnet::to_json(splitnet::compute_metrics(run.trace, t));
  j["violations"] = splitnet::to_json(violations);
  if (!violations.empty()) {
    std::string path = a.schedule_out;
    if (path.empty()) path = a.trace_out.empty() ? "splitnet-replay.json" : a.trace_out + ".schedule.json";
    write_file(path, splitnet::write_schedule(violations.front().schedule_prefix));
    j["replay_schedule"] = path;
  }
  print(j);
  return violations.empty() ? kPass : kViolation;
}

struct ExploreArgs {
  std::string kind = "splitter";
  std::uint32_t size = 1;
  std::uint32_t procs = 1;
  std::uint64_t cap = splitnet::ExploreOptions{}.interleaving_bound;
  bool no_memo = false;
};

int cmd_explore(const ExploreArgs& a) {
  std::optional<splitnet::Topology> t;
  if (a.kind == "splitter") {
    t = splitnet::build_grid(1);
  } else if (a.kind == "tree") {
    t = splitnet::build_tree(a.size);
  } else {
    t = splitnet::build_grid(a.size);
  }
  splitnet::ExploreOptions options;
  options.interleaving_bound = a.cap;
  options.memoize = !a.no_memo;
  ojson j;
  j["kind"] = a.kind;
  j["size"] = a.kind == "splitter" ? 1 : a.size;
  j["procs"] = a.procs;
  try {
    const auto report = splitnet::explore_exhaustive(*t, a.procs, options);
    j.update(splitnet::to_json(report));
    print(j);
    return report.violation_count == 0 ? kPass : kViolation;
  } catch (const splitnet::ExplorationRefused& e) {
    j["refused"] = e.what();
    j["estimate"] = e.estimate();
    print(j);
    return kUsage;
  }
}

struct StressArgs {
  std::uint32_t n = 1;
  std::uint32_t runs = 1;
  std::uint64_t seed = 0;
  bool no_jitter = false;
};

int cmd_stress(const StressArgs& a) {
  const splitnet::Topology t = splitnet::build_full(a.n);
  const auto depth = splitnet::validate(t).depth;
  const auto results = splitnet::execute_threads(t, a.n, a.runs, {a.seed, !a.no_jitter});

  std::uint32_t passed = 0;
  std::optional<splitnet::NodeId> max_name;
  ojson failures = ojson::array();
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& res = results[r];
    auto violations = splitnet::check_result(res, t);
    for (std::size_t pid = 0; pid < res.visits.size(); ++pid) {
      if (res.visits[pid] > depth) {
        violations.push_back({splitnet::ViolationKind::kDepthBound, "process " + std::to_string(pid),
                              std::to_string(res.visits[pid]) + " visits > depth " + std::to_string(depth),
                              {}});
      }
    }
    if (res.finished_count() != a.n) {
      violations.push_back({splitnet::ViolationKind::kNetworkOverflow, "run " + std::to_string(r),
                            std::to_string(res.finished_count()) + " of " + std::to_string(a.n) + " named",
                            {}});
    }
    for (const auto& s : res.status) {
      if (s.finished() && (!max_name || s.node > *max_name)) max_name = s.node;
    }
    if (violations.empty()) {
      ++passed;
    } else {
      failures.push_back({{"run", r}, {"result", splitnet::to_json(res)}, {"violations", splitnet::to_json(violations)}});
    }
  }
  ojson j;
  j["n"] = a.n;
  j["runs"] = a.runs;
  j["seed"] = a.seed;
  j["passed"] = passed;
  j["splitter_count"] = t.node_count();
  j["max_name"] = max_name ? ojson(*max_name) : ojson(nullptr);
  j["failures"] = std::move(failures);
  print(j);
  return passed == a.runs ? kPass : kViolation;
}

struct CheckArgs {
  std::string topo, trace;
};

int cmd_check(const CheckArgs& a, bool with_metrics) {
  const splitnet::Topology t = load_topology(a.topo);
  const splitnet::Trace trace = splitnet::read_trace(read_file(a.trace));
  const std::string hash = splitnet::topology_hash(t);
  if (trace.header.topology_hash != hash) {
    throw UsageError("trace was recorded on topology " + trace.header.topology_hash + ", not " + hash);
  }
  const auto violations = splitnet::check_all(trace, t);
  ojson j;
  j["seed"] = trace.header.seed;
  j["policy"] = trace.header.policy;
  j["procs"] = trace.header.processes;
  j["topology_hash"] = hash;
  j["violations"] = splitnet::to_json(violations);
  if (with_metrics) j["metrics"] = splitnet::to_json(splitnet::compute_metrics(trace, t));
  print(j);
  return violations.empty() ? kPass : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splitter-network renaming toolkit"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "build a topology and print its size and depth");
  b->add_option("--kind", build.kind)->required()->check(CLI::IsMember({"grid", "tree", "stage", "full", "adaptive"}));
  b->add_option("--m", build.m, "grid side");
  b->add_option("--n", build.n, "process bound");
  b->add_option("--size", build.size, "tree size");
  b->add_option("--out", build.out, "topology JSON path");
  b->add_option("--dot", build.dot, "DOT export path");
  b->add_flag("--per-wire-trees", build.per_wire, "one tree per anti-diagonal output wire");

  RunArgs run;
  auto* r = app.add_subcommand("run", "simulate, check and print metrics");
  r->add_option("--topo", run.topo)->required();
  r->add_option("--procs", run.procs)->required()->check(CLI::PositiveNumber);
  r->add_option("--sched", run.sched)->check(CLI::IsMember({"round_robin", "random", "adversary", "replay"}));
  r->add_option("--seed", run.seed);
  r->add_option("--trace-out", run.trace_out);
  r->add_option("--schedule", run.schedule, "schedule to replay");
  r->add_option("--schedule-out", run.schedule_out, "where to write a violating schedule");

  ExploreArgs explore;
  auto* e = app.add_subcommand("explore", "enumerate every interleaving");
  e->add_option("--kind", explore.kind)->check(CLI::IsMember({"splitter", "tree", "grid"}));
  e->add_option("--size", explore.size)->check(CLI::PositiveNumber);
  e->add_option("--procs", explore.procs)->check(CLI::PositiveNumber);
  e->add_option("--cap", explore.cap, "refuse above this many estimated interleavings");
  e->add_flag("--no-memo", explore.no_memo, "walk every interleaving without merging states");

  StressArgs stress;
  auto* s = app.add_subcommand("stress", "run full(n) on real threads");
  s->add_option("--n", stress.n)->required()->check(CLI::PositiveNumber);
  s->add_option("--runs", stress.runs)->check(CLI::PositiveNumber);
  s->add_option("--seed", stress.seed);
  s->add_flag("--no-jitter", stress.no_jitter);

  CheckArgs verify;
  auto* v = app.add_subcommand("verify", "re-check a stored topology and trace");
  v->add_option("--topo", verify.topo)->required();
  v->add_option("--trace", verify.trace)->required();

  CheckArgs report;
  auto* p = app.add_subcommand("report", "violations and metrics for a stored trace");
  p->add_option("--topo", report.topo)->required();
  p->add_option("--trace", report.trace)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kUsage;
  }

  try {
    if (*b) return cmd_build(build);
    if (*r) return cmd_run(run);
    if (*e) return cmd_explore(explore);
    if (*s) return cmd_stress(stress);
    if (*v) return cmd_check(verify, false);
    return cmd_check(report, true);
  } catch (const std::exception& ex) {
    // Topology, trace and schedule errors all land here.
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  }
}
