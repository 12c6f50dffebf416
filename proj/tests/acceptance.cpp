#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "mapfe/bench.hpp"
#include "mapfe/cbs.hpp"
#include "mapfe/oracle.hpp"
#include "support/brute.hpp"
#include "support/cases.hpp"

using namespace mapfe;
using cases::at;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
};

std::set<int> failed;

void report(int id, const std::string& name, Verdict& v) {
  std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << "  " << name << ": " << v.detail.str() << std::endl;
  if (!v.pass) failed.insert(id);
}

const std::vector<Variant> kVariants = {parse_variant("CBS"), parse_variant("CBS+EC"), parse_variant("CBS+MDD-E"),
                                        parse_variant("CBS+EC+MDD-E")};

SolverConfig config_for(const Variant& v, double limit) {
  SolverConfig c;
  c.ec_enabled = v.ec;
  c.mdde_enabled = v.mdde;
  c.time_limit = limit;
  return c;
}

struct Solved {
  Instance instance;
  std::vector<Path> paths;
};

std::vector<Solved> solutions;
// Keyed by an instance label; one g per variant that solved it.
std::map<std::string, std::map<std::string, Time>> g_by_instance;

void oracle_optimality() {
  Verdict v;
  const auto started = std::chrono::steady_clock::now();
  int instances = 0, mismatches = 0, unsolved = 0;
  for (int idx = 0; idx < 200; ++idx) {
    GenParams p;
    p.elevators = 1 + idx % 3;
    p.t_floor = (idx / 3) % 2 ? 3 : 1;
    const int agents = 2 + (idx / 6) % 2;
    const auto seed = instance_seed(77, p.floors, p.t_floor, agents, idx);
    const auto inst = gen_instance(p, agents, seed);
    ++instances;
    const auto exact = oracle_solve(inst, 200);
    if (!exact.solved) {
      ++unsolved;
      continue;
    }
    for (const auto& variant : kVariants) {
      auto sol = solve(inst, config_for(variant, 60));
      if (sol.status != SolveStatus::Solved) {
        ++unsolved;
        std::cerr << "unsolved: instance " << idx << " " << variant.name << " expanded=" << sol.stats.expanded
                  << " oracle=" << exact.soc << '\n';
        continue;
      }
      if (sol.soc != exact.soc) {
        ++mismatches;
        std::cerr << "mismatch: instance " << idx << " " << variant.name << " g=" << sol.soc
                  << " oracle=" << exact.soc << '\n';
      }
      g_by_instance["oracle-" + std::to_string(idx)][variant.name] = sol.soc;
      solutions.push_back({inst, std::move(sol.paths)});
    }
    g_by_instance["oracle-" + std::to_string(idx)]["oracle"] = exact.soc;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  v.pass = instances >= 200 && mismatches == 0 && unsolved == 0;
  v.detail << instances << " instances x 4 variants, " << mismatches << " mismatches, " << unsolved
           << " unsolved, " << static_cast<int>(secs) << " s";
  report(1, "oracle optimality", v);
}

void disjunctive_property() {
  Verdict v;
  std::mt19937_64 rng(1);
  std::map<std::pair<int, Time>, MultiFloorGraph> towers;
  auto tower = [&](int floors, Time tf) -> const MultiFloorGraph& {
    auto it = towers.find({floors, tf});
    if (it != towers.end()) return it->second;
    std::string text = "type mapf-e\nfloors " + std::to_string(floors) + "\nheight 1\nwidth 2\ntfloor " +
                       std::to_string(tf) + "\nmap\n";
    for (int f = 0; f < floors; ++f) text += (f ? "\nE.\n" : "E.\n");
    return towers.emplace(std::make_pair(floors, tf), parse_map_string(text)).first->second;
  };
  auto pick_pair = [&](int floors) {
    const int a = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(floors));
    int b = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(floors - 1));
    if (b >= a) ++b;
    return std::make_pair(a, b);
  };
  long tuples = 0, pairs = 0, counterexamples = 0;
  while (tuples < 10000) {
    const int floors = 2 + static_cast<int>(rng() % 5);
    const Time tf = 1 + static_cast<Time>(rng() % 4);
    const auto [lsi, lgi] = pick_pair(floors);
    const auto [lsj, lgj] = pick_pair(floors);
    const Time tsi = static_cast<Time>(rng() % 20);
    const Time busy_i = tsi + (std::abs(lsi - lgi) + std::abs(lgi - lsj)) * tf;
    const Time tsj = tsi + static_cast<Time>(rng() % static_cast<std::uint64_t>(busy_i - tsi + 1));
    const auto usage = [&](int agent, Time ts, int from, int to) {
      return ElevatorUsage{agent, 0, ts, from, to, ts + std::abs(from - to) * tf};
    };
    const BoardingConflict c{usage(0, tsi, lsi, lgi), usage(1, tsj, lsj, lgj), tsj};
    const auto [oi, oj] = ec_constraints(tower(floors, tf), c);
    const auto& bi = std::get<BoardingBan>(oi.constraint);
    const auto& bj = std::get<BoardingBan>(oj.constraint);
    ++tuples;
    for (Time x = bi.when.lo; x <= bi.when.hi; ++x)
      for (Time y = bj.when.lo; y <= bj.when.hi; ++y) {
        ++pairs;
        const Time in_i = x + (std::abs(lsi - lgi) + std::abs(lgi - lsj)) * tf;
        const Time in_j = y + (std::abs(lsj - lgj) + std::abs(lgj - lsi)) * tf;
        const bool overlap = (x <= y && y <= in_i) || (y <= x && x <= in_j);
        if (!overlap) ++counterexamples;
      }
  }
  v.pass = tuples >= 10000 && counterexamples == 0;
  v.detail << tuples << " tuples, " << pairs << " (x,y) pairs, " << counterexamples << " counterexamples";
  report(2, "elevator constraints are mutually disjunctive", v);
}

void shared_car_golden() {
  Verdict v;
  const auto inst = cases::elevator_constraints();
  CbsSolver probe(inst, config_for(parse_variant("CBS+EC"), 30));
  const auto root = probe.root();
  const auto conflict = root ? probe.find_conflict(*root) : std::nullopt;
  const auto* bc = conflict ? std::get_if<BoardingConflict>(&*conflict) : nullptr;
  bool intervals = false;
  if (bc) {
    const auto [oi, oj] = ec_constraints(inst.graph(), *bc);
    const auto& bi = std::get<BoardingBan>(oi.constraint);
    const auto& bj = std::get<BoardingBan>(oj.constraint);
    const Interval want{1, 3};
    intervals = bc->first.board_time == 1 && bc->second.board_time == 1 && bi.when == want &&
                bj.when == want && inst.graph().door(bi.elevator, bi.floor) == Vertex{bi.floor, 0, 0} &&
                inst.graph().door(bj.elevator, bj.floor) == Vertex{bj.floor, 0, 0};
  }
  const auto ec = solve(inst, config_for(parse_variant("CBS+EC"), 30));
  const auto base = solve(inst, config_for(parse_variant("CBS"), 30));
  v.pass = intervals && ec.status == SolveStatus::Solved && ec.stats.elevator_branchings == 1 &&
           base.status == SolveStatus::Solved && base.stats.expanded >= 3 && ec.soc == base.soc;
  v.detail << "intervals [1,3] on A1 " << (intervals ? "yes" : "no") << ", CBS+EC elevator branchings "
           << ec.stats.elevator_branchings << ", CBS expansions " << base.stats.expanded << ", g " << ec.soc << "/"
           << base.soc;
  report(3, "shared-car golden", v);
}

void resetting_car_golden() {
  Verdict v;
  const auto inst = cases::elevator_mdd();
  const auto& g = inst.graph();
  const std::vector<Path> paths{parse_path("(1,1,0)@0 (1,0,0)@1 (2,0,0)@2 (2,1,0)@3 (2,2,0)@4"),
                                parse_path("(1,3,0)@0 (1,2,0)@1 (1,1,0)@2 (1,0,0)@3 (2,0,0)@4 (2,0,1)@5")};
  const auto conflicts = detect_conflicts(paths, g);
  const bool detected = conflicts.size() == 1 && std::holds_alternative<BoardingConflict>(conflicts[0]) &&
                        conflict_time(conflicts[0]) == 3;
  const auto mi = build_mdd_e(inst.agent(0), 4, ConstraintSet{}, g);
  const auto mj = build_mdd_e(inst.agent(1), 5, ConstraintSet{}, g);
  const Vertex e1 = at(2, "E1", 'D');
  const Vertex a1 = at(1, "A1");
  const bool plain = build_joint(mi, mj, g, JointMode::Plain).contains(3, e1, a1);
  const bool aware = build_joint(mi, mj, g, JointMode::ElevatorAware).contains(3, e1, a1);
  const bool node = mi.find(e1, 3, 0, 1) >= 0;
  v.pass = detected && plain && !aware && node;
  v.detail << "conflict at t=3 " << (detected ? "yes" : "no") << ", plain joint has ((E1,3),(A1,3)) "
           << (plain ? "yes" : "no") << ", elevator-aware joint has it " << (aware ? "yes" : "no");
  report(4, "resetting-car golden", v);
}

void mdd_golden() {
  Verdict v;
  const auto single = cases::single_mdd();
  const auto m = build_mdd_e(single.agent(0), 2, ConstraintSet{}, single.graph());
  const bool level = m.vertices_at(1) == std::vector<Vertex>{at(1, "C1"), at(1, "B2")};
  const auto pair = cases::joint_mdd();
  const auto& g = pair.graph();
  const auto mi = build_mdd_e(pair.agent(0), 3, ConstraintSet{}, g);
  const auto mj = build_mdd_e(pair.agent(1), 1, ConstraintSet{}, g);
  const auto joint = build_joint(mi, mj, g);
  const bool only = joint.level(1).size() == 1 && joint.contains(1, at(1, "C3"), at(1, "B2"));
  v.pass = level && only;
  v.detail << "single level 1 = {B2,C1} " << (level ? "yes" : "no") << ", joint level 1 = {((C3,1),(B2,1))} "
           << (only ? "yes" : "no");
  report(5, "MDD golden", v);
}

std::vector<ResultRecord> trend_records;

void trend() {
  Verdict v;
  ExperimentConfig cfg;
  cfg.experiment = "trend";
  cfg.floors = {2};
  cfg.elevators = 3;
  cfg.t_floor = {3};
  cfg.agents = {4, 6, 8};
  cfg.instances = 25;
  cfg.seed = 2024;
  cfg.time_limit = 20;
  cfg.variants = {parse_variant("CBS"), parse_variant("CBS+EC"), parse_variant("CBS+EC+MDD-E")};
  trend_records = run_suite(cfg);

  std::map<std::pair<int, std::uint64_t>, std::map<std::string, const ResultRecord*>> by_instance;
  for (const auto& r : trend_records) {
    by_instance[{r.agents, r.seed}][r.variant] = &r;
    if (r.solved) g_by_instance["trend-" + std::to_string(r.agents) + "-" + std::to_string(r.seed)][r.variant] = *r.soc;
  }
  auto median = [](std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
  };
  for (int n : cfg.agents) {
    std::vector<double> base, ec;
    int runs = 0, base_ok = 0, full_ok = 0;
    for (const auto& [key, row] : by_instance) {
      if (key.first != n) continue;
      ++runs;
      const auto* b = row.at("CBS");
      const auto* e = row.at("CBS+EC");
      const auto* f = row.at("CBS+EC+MDD-E");
      base_ok += b->solved;
      full_ok += f->solved;
      if (b->solved && e->solved) {
        base.push_back(static_cast<double>(b->expanded));
        ec.push_back(static_cast<double>(e->expanded));
      }
    }
    const double mb = median(base), me = median(ec);
    const bool ok = runs >= 25 && me <= mb && full_ok >= base_ok;
    v.pass = v.pass && ok;
    v.detail << "N=" << n << ": median expansions CBS+EC " << me << " vs CBS " << mb << " over " << base.size()
             << " common, success CBS+EC+MDD-E " << full_ok << "/" << runs << " vs CBS " << base_ok << "/" << runs
             << "; ";
  }
  report(7, "trend ordering", v);
}

void variant_agreement() {
  Verdict v;
  int compared = 0, disagreements = 0;
  for (const auto& [label, gs] : g_by_instance) {
    if (gs.size() < 2) continue;
    ++compared;
    const Time first = gs.begin()->second;
    for (const auto& [variant, value] : gs)
      if (value != first) {
        ++disagreements;
        std::cerr << "disagreement on " << label << ": " << variant << " g=" << value << '\n';
      }
  }
  v.pass = disagreements == 0 && compared > 0;
  v.detail << compared << " instances solved by several variants, " << disagreements << " disagreements";
  report(6, "variant agreement", v);
}

void low_level() {
  Verdict v;
  std::mt19937_64 rng(3);
  int cases = 0, mismatches = 0, range_bans = 0;
  for (int m = 0; cases < 600; ++m) {
    GenParams p;
    p.width = 4 + m % 3;
    p.height = 3 + m % 2;
    p.floors = 2 + m % 2;
    p.elevators = 1 + m % 2;
    p.t_floor = 1 + m % 3;
    p.obstacle_rate = 0.15;
    const auto g = gen_instance(p, 1, 1000 + static_cast<std::uint64_t>(m)).graph();
    std::vector<Vertex> cells, all;
    for (int i = 0; i < g.num_vertices(); ++i) {
      const Vertex x = g.vertex(i);
      if (!g.is_free(x)) continue;
      all.push_back(x);
      if (!g.is_door(x)) cells.push_back(x);
    }
    for (int trial = 0; trial < 20; ++trial, ++cases) {
      const Agent a{0, cells[rng() % cells.size()], cells[rng() % cells.size()]};
      ConstraintSet cs;
      for (int c = 0, n = static_cast<int>(rng() % 10); c < n; ++c) {
        const Time lo = static_cast<Time>(rng() % 12);
        cs.add(VertexBan{all[rng() % all.size()], {lo, lo + static_cast<Time>(rng() % 3)}});
      }
      for (int c = 0, n = static_cast<int>(rng() % 3); c < n; ++c) {
        const Time lo = static_cast<Time>(rng() % 10);
        cs.add(BoardingBan{static_cast<int>(rng() % g.elevators().size()), a.start.floor,
                           {lo, lo + static_cast<Time>(rng() % 6)}});
        ++range_bans;
      }
      for (int c = 0, n = static_cast<int>(rng() % 3); c < n; ++c) {
        const Vertex from = cells[rng() % cells.size()];
        const auto nbs = brute::same_floor_moves(g, from);
        if (!nbs.empty()) cs.add(EdgeBan{from, nbs[rng() % nbs.size()], static_cast<Time>(rng() % 8)});
      }
      const auto got = plan(a, g, cs);
      const auto ref = brute::time_expanded_cost(a, cs, g, 120);
      const bool same = got.has_value() == ref.has_value() &&
                        (!got || (got->cost() == *ref && !check_path(*got, a, g)));
      if (!same) ++mismatches;
    }
  }
  v.pass = cases >= 500 && mismatches == 0;
  v.detail << cases << " cases (" << range_bans << " range boarding bans), " << mismatches << " mismatches";
  report(8, "low-level optimality", v);
}

/// Same path with one extra tick of waiting inserted after step k.
std::optional<Path> delayed(const Path& p, std::size_t k) {
  if (k + 1 >= p.steps.size() || p.steps[k + 1].t != p.steps[k].t + 1) return std::nullopt;
  Path q;
  q.steps.assign(p.steps.begin(), p.steps.begin() + static_cast<std::ptrdiff_t>(k) + 1);
  q.steps.push_back({p.steps[k].v, p.steps[k].t + 1});
  for (std::size_t s = k + 1; s < p.steps.size(); ++s) q.steps.push_back({p.steps[s].v, p.steps[s].t + 1});
  return q;
}

void validation() {
  Verdict v;
  int invalid = 0, mutants = 0, conflicting = 0, missed = 0, spurious = 0;
  for (const auto& s : solutions) {
    if (!validate(s.instance, s.paths).ok() || !brute::joint_legal(s.paths, s.instance.graph())) ++invalid;
    for (std::size_t a = 0; a < s.paths.size(); ++a)
      for (std::size_t k = 0; k < s.paths[a].steps.size(); ++k) {
        auto q = delayed(s.paths[a], k);
        if (!q) continue;
        auto mutated = s.paths;
        mutated[a] = std::move(*q);
        const auto r = validate(s.instance, mutated);
        if (!r.invalid.empty()) continue;
        ++mutants;
        const bool legal = brute::joint_legal(mutated, s.instance.graph());
        if (!legal) ++conflicting;
        if (!legal && r.conflicts.empty()) ++missed;
        if (legal && !r.conflicts.empty()) ++spurious;
      }
  }
  v.pass = !solutions.empty() && invalid == 0 && missed == 0 && spurious == 0 && conflicting > 0;
  v.detail << solutions.size() << " solutions, " << invalid << " rejected; " << mutants << " one-tick mutants, "
           << conflicting << " conflicting, " << missed << " missed, " << spurious << " spurious";
  report(9, "validation soundness", v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance criteria");
  std::vector<int> expected;
  app.add_option("--expect-fail", expected, "criteria known to fail; exit 0 only if exactly these fail");
  CLI11_PARSE(app, argc, argv);
  disjunctive_property();
  shared_car_golden();
  resetting_car_golden();
  mdd_golden();
  low_level();
  oracle_optimality();
  validation();
  trend();
  variant_agreement();
  std::cout << (failed.empty() ? "PASS" : "FAIL") << "  acceptance: " << failed.size() << " failing criteria";
  if (!expected.empty()) {
    std::cout << " (expected to fail:";
    for (int id : expected) std::cout << ' ' << id;
    std::cout << ')';
  }
  std::cout << std::endl;
  return failed == std::set<int>(expected.begin(), expected.end()) ? 0 : 1;
}
