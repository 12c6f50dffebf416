#include "mapfe/cbs.hpp"

#include <queue>

namespace mapfe {
namespace {

constexpr std::size_t kMddCachePerAgent = 32;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_elevator_conflict(const Conflict& c) {
  return std::holds_alternative<BoardingConflict>(c) || std::holds_alternative<OccupancyConflict>(c);
}

class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink) : sink_(sink), start_(Clock::now()) {}
  ~ScopedTimer() { sink_ += seconds_since(start_); }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double& sink_;
  Clock::time_point start_;
};

}  // namespace

CbsSolver::CbsSolver(const Instance& instance, SolverConfig config)
    : instance_(instance), config_(config), mdd_cache_(static_cast<std::size_t>(instance.num_agents())) {
  planners_.reserve(static_cast<std::size_t>(instance.num_agents()));
  for (const auto& a : instance.agents()) planners_.emplace_back(instance.graph(), a);
  started_ = Clock::now();
}

bool CbsSolver::out_of_time() const { return seconds_since(started_) > config_.time_limit; }

std::vector<Conflict> CbsSolver::conflicts_of(const CtNode& node) const {
  std::vector<Timeline> timelines;
  timelines.reserve(node.paths.size());
  for (std::size_t i = 0; i < node.paths.size(); ++i)
    timelines.emplace_back(*node.paths[i], instance_.graph(), static_cast<int>(i));
  return detect_conflicts(timelines, instance_.graph());
}

std::optional<CtNode> CbsSolver::root() {
  CtNode node;
  const auto empty = std::make_shared<const ConstraintSet>();
  for (const auto& planner : planners_) {
    auto path = planner.plan(*empty);
    if (!path) return std::nullopt;
    node.g += path->cost();
    node.paths.push_back(std::make_shared<const Path>(std::move(*path)));
    node.constraints.push_back(empty);
  }
  node.conflict_count = conflicts_of(node).size();
  node.seq = next_seq_++;
  return node;
}

std::shared_ptr<const Mdd> CbsSolver::mdd(const CtNode& node, int agent) {
  const auto a = static_cast<std::size_t>(agent);
  const Time cost = node.paths[a]->cost();
  auto& cache = mdd_cache_[a];
  for (const auto& entry : cache)
    if (entry.owner == node.constraints[a] && entry.cost == cost) return entry.mdd;
  auto built = std::make_shared<const Mdd>(build_mdd_e(instance_.agent(agent), cost, *node.constraints[a],
                                                       instance_.graph(), planners_[a].distance(),
                                                       config_.mdd_node_cap));
  cache.push_front(CachedMdd{node.constraints[a], cost, built});
  if (cache.size() > kMddCachePerAgent) cache.pop_back();
  return built;
}

bool CbsSolver::has_alternative(const CtNode& node, const AgentConstraint& ac) {
  const auto m = mdd(node, ac.agent);
  if (m->overflow() || m->empty()) return false;
  const Constraint extra[] = {ac.constraint};
  return !m->restricted(extra).empty();
}

Cardinality CbsSolver::classify(const CtNode& node, const Conflict& c) {
  ScopedTimer timer(stats_.mdde_seconds);
  const auto [first, second] = branch_constraints(instance_.graph(), c, config_.ec_enabled);
  const bool a = has_alternative(node, first);
  const bool b = has_alternative(node, second);
  if (a && b) return Cardinality::NonCardinal;
  if (a || b) return Cardinality::SemiCardinal;
  return Cardinality::Cardinal;
}

std::optional<std::pair<Conflict, Cardinality>> CbsSolver::select(const CtNode& node) {
  const auto all = conflicts_of(node);
  if (all.empty()) return std::nullopt;
  if (!config_.mdde_enabled) return std::make_pair(all.front(), Cardinality::Cardinal);
  std::optional<std::size_t> semi, non;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (out_of_time()) break;
    const auto kind = classify(node, all[i]);
    if (kind == Cardinality::Cardinal) return std::make_pair(all[i], kind);
    if (kind == Cardinality::SemiCardinal && !semi) semi = i;
    if (kind == Cardinality::NonCardinal && !non) non = i;
  }
  if (semi) return std::make_pair(all[*semi], Cardinality::SemiCardinal);
  if (non) return std::make_pair(all[*non], Cardinality::NonCardinal);
  return std::make_pair(all.front(), Cardinality::Cardinal);
}

std::optional<Conflict> CbsSolver::find_conflict(const CtNode& node) {
  auto s = select(node);
  if (!s) return std::nullopt;
  return s->first;
}

std::optional<std::pair<int, Path>> CbsSolver::find_bypass(const CtNode& node, const Conflict& c) {
  ScopedTimer timer(stats_.mdde_seconds);
  const auto [i, j] = conflict_agents(c);
  for (const auto& [self, other] : {std::pair{i, j}, std::pair{j, i}}) {
    const auto m = mdd(node, self);
    if (m->overflow() || m->empty()) continue;
    const auto& other_agent = instance_.agent(other);
    const Mdd chain = Mdd::from_path(instance_.graph(), other_agent, *node.paths[static_cast<std::size_t>(other)]);
    const JointMdd joint = self < other ? build_joint(*m, chain, instance_.graph())
                                        : build_joint(chain, *m, instance_.graph());
    const auto pair = joint.extract();
    if (!pair) continue;
    Path candidate = self < other ? pair->first : pair->second;
    if (candidate == *node.paths[static_cast<std::size_t>(self)]) continue;
    CtNode trial = node;
    trial.paths[static_cast<std::size_t>(self)] = std::make_shared<const Path>(candidate);
    if (conflicts_of(trial).size() < node.conflict_count) return std::make_pair(self, std::move(candidate));
  }
  return std::nullopt;
}

std::vector<CtNode> CbsSolver::branch(const CtNode& node, const Conflict& c) {
  std::vector<CtNode> children;
  const auto [first, second] = branch_constraints(instance_.graph(), c, config_.ec_enabled);
  for (const auto& ac : {first, second}) {
    const auto a = static_cast<std::size_t>(ac.agent);
    auto cs = std::make_shared<ConstraintSet>(*node.constraints[a]);
    cs->add(ac.constraint);
    auto path = planners_[a].plan(*cs);
    if (!path) continue;
    CtNode child = node;
    child.g += path->cost() - node.paths[a]->cost();
    child.paths[a] = std::make_shared<const Path>(std::move(*path));
    child.constraints[a] = std::move(cs);
    child.conflict_count = conflicts_of(child).size();
    child.seq = next_seq_++;
    if (is_elevator_conflict(c)) ++child.elevator_branchings;
    children.push_back(std::move(child));
  }
  return children;
}

Solution CbsSolver::solve() {
  started_ = Clock::now();
  stats_ = SolveStats{};
  Solution sol;
  auto finish = [&](SolveStatus status) {
    stats_.runtime = seconds_since(started_);
    stats_.mdde_time_fraction = stats_.runtime > 0 ? std::min(1.0, stats_.mdde_seconds / stats_.runtime) : 0.0;
    stats_.solved = status == SolveStatus::Solved;
    sol.status = status;
    sol.stats = stats_;
    return sol;
  };

  auto start = root();
  if (!start) return finish(SolveStatus::Infeasible);
  stats_.generated = 1;

  auto worse = [](const std::shared_ptr<CtNode>& a, const std::shared_ptr<CtNode>& b) {
    if (a->g != b->g) return a->g > b->g;
    if (a->conflict_count != b->conflict_count) return a->conflict_count > b->conflict_count;
    return a->seq > b->seq;
  };
  std::priority_queue<std::shared_ptr<CtNode>, std::vector<std::shared_ptr<CtNode>>, decltype(worse)> open(worse);
  open.push(std::make_shared<CtNode>(std::move(*start)));

  while (!open.empty()) {
    if (out_of_time()) return finish(SolveStatus::Timeout);
    auto node = open.top();
    open.pop();
    const auto chosen = select(*node);
    if (!chosen) {
      for (const auto& p : node->paths) sol.paths.push_back(*p);
      sol.soc = node->g;
      stats_.elevator_branchings = node->elevator_branchings;
      return finish(SolveStatus::Solved);
    }
    if (out_of_time()) return finish(SolveStatus::Timeout);
    const auto& [conflict, kind] = *chosen;
    if (config_.mdde_enabled && kind != Cardinality::Cardinal) {
      if (auto bypass = find_bypass(*node, conflict)) {
        node->paths[static_cast<std::size_t>(bypass->first)] = std::make_shared<const Path>(std::move(bypass->second));
        node->conflict_count = conflicts_of(*node).size();
        ++stats_.bypasses;
        open.push(std::move(node));
        continue;
      }
    }
    ++stats_.expanded;
    for (auto& child : branch(*node, conflict)) {
      ++stats_.generated;
      open.push(std::make_shared<CtNode>(std::move(child)));
    }
  }
  return finish(SolveStatus::Infeasible);
}

Solution solve(const Instance& instance, const SolverConfig& config) { return CbsSolver(instance, config).solve(); }

}  // namespace mapfe
