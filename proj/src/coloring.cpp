#include "ascpr/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include <fmt/format.h>

#include "ascpr/parallel.hpp"

namespace ascpr {

// -- StrongConnections -------------------------------------------------------

StrongConnections::StrongConnections(Index n, double theta, std::vector<Index> row_ptr,
                                     std::vector<Index> col_idx)
    : n_(n), theta_(theta), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)) {
  if (row_ptr_.size() != static_cast<std::size_t>(n_) + 1)
    throw InputError("strong connections: row_ptr must have n+1 entries");
}

Index StrongConnections::max_degree() const noexcept {
  Index m = 0;
  for (Index i = 0; i < n_; ++i) m = std::max(m, degree(i));
  return m;
}

bool StrongConnections::contains(Index i, Index j) const noexcept {
  auto const nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

StrongConnections strong_connections(CsrMatrix const& a, double theta, int workers) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw InputError(fmt::format("strength threshold {} outside [0, 1]", theta));
  if (!a.square()) throw DimensionError("strong connections need a square matrix");
  Index const n = a.rows();

  auto is_strong = [&](Index i, double threshold, std::size_t k) {
    return a.row_cols(i)[k] != i && std::abs(a.row_values(i)[k]) > threshold;
  };
  std::vector<double> threshold(n);
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  parallel_for(workers, 0, n, [&](Index i) {
    double sum = 0.0;
    for (double v : a.row_values(i)) sum += std::abs(v);
    threshold[i] = theta * sum;
    Index count = 0;
    for (std::size_t k = 0; k < a.row_cols(i).size(); ++k)
      count += is_strong(i, threshold[i], k) ? 1 : 0;
    row_ptr[i + 1] = count;
  });
  for (Index i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];

  std::vector<Index> col_idx(row_ptr[n]);
  parallel_for(workers, 0, n, [&](Index i) {
    Index out = row_ptr[i];
    auto const cols = a.row_cols(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (is_strong(i, threshold[i], k)) col_idx[out++] = cols[k];
  });
  return StrongConnections(n, theta, std::move(row_ptr), std::move(col_idx));
}

StrongConnections strong_connections(BlockCsrMatrix const& a, double theta, int workers) {
  return strong_connections(block_norms(a), theta, workers);
}

StrongConnections symmetrize(StrongConnections const& s) {
  Index const n = s.size();
  std::vector<std::vector<Index>> adj(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j : s.neighbors(i)) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> col_idx;
  col_idx.reserve(2 * static_cast<std::size_t>(s.edges()));
  for (Index i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    col_idx.insert(col_idx.end(), row.begin(), row.end());
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
  }
  return StrongConnections(n, s.theta(), std::move(row_ptr), std::move(col_idx));
}

// -- ColorPartition ----------------------------------------------------------

ColorPartition::ColorPartition(Index n, std::vector<std::vector<Index>> groups)
    : groups_(std::move(groups)), color_of_(n, -1) {
  for (Index c = 0; c < colors(); ++c) {
    auto& g = groups_[c];
    if (g.empty()) throw InputError(fmt::format("color {} is empty", c));
    std::sort(g.begin(), g.end());
    for (Index v : g) {
      if (v < 0 || v >= n)
        throw InputError(fmt::format("vertex {} outside [0, {})", v, n));
      if (color_of_[v] >= 0)
        throw InputError(fmt::format("vertex {} appears in colors {} and {}", v,
                                     color_of_[v], c));
      color_of_[v] = c;
    }
  }
  for (Index v = 0; v < n; ++v) {
    if (color_of_[v] < 0) throw InputError(fmt::format("vertex {} has no color", v));
  }
}

std::vector<Index> ColorPartition::ordering() const {
  std::vector<Index> order;
  order.reserve(color_of_.size());
  for (auto const& g : groups_) order.insert(order.end(), g.begin(), g.end());
  return order;
}

// -- splitting and grouping --------------------------------------------------

SplitState::SplitState(StrongConnections const& s)
    : s_(&s),
      round_(s.size(), 0),
      status_(s.size(), Status::kOutside),
      frontier_(s.size(), 0),
      circle_(s.size(), 0) {}

void SplitState::begin_round(std::span<Index const> undetermined) {
  ++epoch_;
  undetermined_.assign(undetermined.begin(), undetermined.end());
  for (Index v : undetermined_) {
    round_[v] = epoch_;
    status_[v] = Status::kUndetermined;
  }
}

SplitState::Status SplitState::status(Index v) const noexcept {
  return round_[v] == epoch_ ? status_[v] : Status::kOutside;
}

SplitResult vertices_splitting(SplitState& state) {
  using Status = SplitState::Status;
  StrongConnections const& s = *state.s_;
  unsigned const epoch = state.epoch_;
  auto set_status = [&](Index v, Status st) {
    state.round_[v] = epoch;
    state.status_[v] = st;
  };

  // Higher influence first, lower index on ties.
  auto before = [&](Index u, Index v) {
    return s.degree(u) != s.degree(v) ? s.degree(u) > s.degree(v) : u < v;
  };
  std::vector<Index> order = state.undetermined_;
  std::sort(order.begin(), order.end(), before);
  auto heap_cmp = [&](Index u, Index v) { return before(v, u); };
  std::priority_queue<Index, std::vector<Index>, decltype(heap_cmp)> frontier(heap_cmp);

  SplitResult out;
  std::size_t remaining = order.size();
  std::size_t cursor = 0;
  while (remaining > 0) {
    Index v = -1;
    // Frontier entries go stale when a neighbor's acceptance defers them.
    while (!frontier.empty()) {
      Index const top = frontier.top();
      frontier.pop();
      if (state.status(top) == Status::kUndetermined) {
        v = top;
        break;
      }
    }
    if (v < 0) {
      while (state.status(order[cursor]) != Status::kUndetermined) ++cursor;
      v = order[cursor];
    }

    auto const nb = s.neighbors(v);
    bool const independent = std::none_of(nb.begin(), nb.end(), [&](Index j) {
      return state.status(j) == Status::kSelected;
    });
    --remaining;
    if (!independent) {
      set_status(v, Status::kDeferred);
      out.deferred.push_back(v);
      continue;
    }

    set_status(v, Status::kSelected);
    out.selected.push_back(v);
    for (Index k : nb) {
      if (state.status(k) == Status::kUndetermined) {
        set_status(k, Status::kDeferred);
        out.deferred.push_back(k);
        --remaining;
      }
    }
    // Second circle: strong neighbors of strong neighbors, outside S_v + {v}.
    unsigned const mark = ++state.circle_epoch_;
    state.circle_[v] = mark;
    for (Index k : nb) state.circle_[k] = mark;
    for (Index k : nb) {
      for (Index j : s.neighbors(k)) {
        if (state.circle_[j] == mark || state.frontier_[j] == epoch) continue;
        if (state.status(j) != Status::kUndetermined) continue;
        state.frontier_[j] = epoch;
        frontier.push(j);
      }
    }
  }
  return out;
}

SplitResult vertices_splitting(std::span<Index const> undetermined,
                               StrongConnections const& s) {
  SplitState state(s);
  state.begin_round(undetermined);
  return vertices_splitting(state);
}

ColorPartition vertices_grouping(StrongConnections const& s) {
  Index const n = s.size();
  std::vector<Index> remaining(n);
  for (Index v = 0; v < n; ++v) remaining[v] = v;

  SplitState state(s);
  std::vector<std::vector<Index>> groups;
  while (!remaining.empty()) {
    state.begin_round(remaining);
    SplitResult round = vertices_splitting(state);
    groups.push_back(std::move(round.selected));
    remaining = std::move(round.deferred);
  }
  return ColorPartition(n, std::move(groups));
}

ColorPartition color_matrix(CsrMatrix const& a, double theta, int workers) {
  return vertices_grouping(symmetrize(strong_connections(a, theta, workers)));
}

// -- verification ------------------------------------------------------------

bool PartitionReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](auto const& c) { return c.passed; });
}

PartitionReport verify_partition(CsrMatrix const& a, double theta,
                                 std::vector<std::vector<Index>> const& groups) {
  Index const n = a.rows();
  Index const c = static_cast<Index>(groups.size());
  StrongConnections const s = symmetrize(strong_connections(a, theta));

  PartitionReport report;
  report.colors = c;
  report.max_influence = s.max_degree();

  auto fail = [](PartitionCheck& check, std::string detail) {
    if (check.passed) check.detail = std::move(detail);
    check.passed = false;
  };

  PartitionCheck coverage{"(a) coverage", true, {}};
  PartitionCheck disjoint{"(b) disjoint", true, {}};
  std::vector<Index> seen(n, 0);
  for (Index g = 0; g < c; ++g) {
    for (Index v : groups[g]) {
      if (v < 0 || v >= n) {
        fail(coverage, fmt::format("vertex {} out of range in color {}", v, g));
        continue;
      }
      if (++seen[v] > 1) fail(disjoint, fmt::format("vertex {} appears twice", v));
    }
  }
  for (Index v = 0; v < n; ++v)
    if (seen[v] == 0) fail(coverage, fmt::format("vertex {} has no color", v));

  PartitionCheck independent{"(c') strong independence", true, {}};
  PartitionCheck diagonal{"diagonal blocks", true, {}};
  std::vector<Index> member(n, -1);
  for (Index g = 0; g < c; ++g) {
    for (Index v : groups[g])
      if (v >= 0 && v < n) member[v] = g;
    for (Index v : groups[g]) {
      if (v < 0 || v >= n) continue;
      for (Index u : s.neighbors(v)) {
        if (member[u] == g)
          fail(independent, fmt::format("strong edge ({}, {}) inside color {}", v, u, g));
      }
      if (theta == 0.0) {
        auto const cols = a.row_cols(v);
        auto const vals = a.row_values(v);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          if (cols[k] != v && vals[k] != 0.0 && member[cols[k]] == g)
            fail(diagonal, fmt::format("A({}, {}) != 0 inside color {}", v, cols[k], g));
        }
      }
    }
    for (Index v : groups[g])
      if (v >= 0 && v < n) member[v] = -1;
  }

  PartitionCheck bound{"color bound c <= max|S_i| + 1", true, {}};
  if (c > report.max_influence + 1)
    fail(bound, fmt::format("c = {} exceeds {} + 1", c, report.max_influence));

  PartitionCheck termination{"termination 1 <= c <= n", true, {}};
  if (n > 0 && (c < 1 || c > n)) fail(termination, fmt::format("c = {}, n = {}", c, n));
  for (Index g = 0; g < c; ++g)
    if (groups[g].empty()) fail(termination, fmt::format("color {} is empty", g));

  report.checks = {coverage, disjoint, independent, bound, termination};
  if (theta == 0.0) report.checks.push_back(diagonal);
  return report;
}

PartitionReport verify_partition(CsrMatrix const& a, double theta,
                                 ColorPartition const& partition) {
  return verify_partition(a, theta, partition.groups());
}

void write_partition(std::ostream& out, ColorPartition const& p) {
  for (auto const& g : p.groups()) {
    for (std::size_t k = 0; k < g.size(); ++k) out << (k ? " " : "") << g[k];
    out << '\n';
  }
}

std::vector<std::vector<Index>> read_partition(std::istream& in) {
  std::vector<std::vector<Index>> groups;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<Index> g;
    long long v = 0;
    while (ss >> v) g.push_back(static_cast<Index>(v));
    if (!ss.eof()) throw ParseError("malformed vertex index", lineno);
    if (!g.empty()) groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace ascpr
