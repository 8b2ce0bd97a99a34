#pragma once

/// @file coloring.hpp
/// @brief Strong-connection graph and greedy multi-color vertex grouping.
///
/// Vertex i is strongly connected to j (i != j) when
///
///     |a_ij| > theta * sum_k |a_ik|        (row sum includes the diagonal)
///
/// The grouping repeatedly extracts a greedy independent set of the strong
/// graph (largest influence |S_i| first, frontier vertices preferred), each
/// extraction becoming one color. Ties go to the lowest vertex index.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ascpr/sparse.hpp"

namespace ascpr {

/// Pattern-only adjacency of strong connections. Diagonal never stored.
class StrongConnections {
 public:
  StrongConnections() = default;
  StrongConnections(Index n, double theta, std::vector<Index> row_ptr,
                    std::vector<Index> col_idx);

  Index size() const noexcept { return n_; }
  double theta() const noexcept { return theta_; }
  Index edges() const noexcept { return static_cast<Index>(col_idx_.size()); }

  std::span<Index const> neighbors(Index i) const noexcept {
    return {col_idx_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  /// Influence |S_i|.
  Index degree(Index i) const noexcept { return row_ptr_[i + 1] - row_ptr_[i]; }
  Index max_degree() const noexcept;
  bool contains(Index i, Index j) const noexcept;

  std::span<Index const> row_ptr() const noexcept { return row_ptr_; }
  std::span<Index const> col_idx() const noexcept { return col_idx_; }

 private:
  Index n_ = 0;
  double theta_ = 0.0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
};

/// Strong connections of a scalar matrix; throws InputError unless
/// 0 <= theta <= 1.
StrongConnections strong_connections(CsrMatrix const& a, double theta, int workers = 1);

/// Block form: applied to the matrix of block Frobenius norms.
StrongConnections strong_connections(BlockCsrMatrix const& a, double theta,
                                     int workers = 1);

/// S or S^T.
StrongConnections symmetrize(StrongConnections const& s);

/// Ordered disjoint vertex groups V_1..V_c covering 0..n-1. Each group is
/// kept in ascending vertex order.
class ColorPartition {
 public:
  ColorPartition() = default;

  /// Validates coverage and disjointness; throws InputError otherwise.
  ColorPartition(Index n, std::vector<std::vector<Index>> groups);

  Index size() const noexcept { return static_cast<Index>(color_of_.size()); }
  Index colors() const noexcept { return static_cast<Index>(groups_.size()); }
  std::span<Index const> group(Index c) const noexcept { return groups_[c]; }
  std::vector<std::vector<Index>> const& groups() const noexcept { return groups_; }
  /// Zero-based color of each vertex.
  Index color_of(Index v) const noexcept { return color_of_[v]; }

  /// Concatenation of the groups in color order.
  std::vector<Index> ordering() const;

  friend bool operator==(ColorPartition const&, ColorPartition const&) = default;

 private:
  std::vector<std::vector<Index>> groups_;
  std::vector<Index> color_of_;
};

struct SplitResult {
  std::vector<Index> selected;  ///< W, in acceptance order
  std::vector<Index> deferred;  ///< W-bar, in deferral order
};

/// Working sets of one splitting round: the undetermined set V, the
/// selected set W, the deferred set W-bar and the frontier W-hat. Membership
/// is epoch-stamped so a state can be reused across rounds without clearing.
class SplitState {
 public:
  explicit SplitState(StrongConnections const& s);

  enum class Status : unsigned char { kOutside, kUndetermined, kSelected, kDeferred };

  /// Starts a round over the given undetermined vertices.
  void begin_round(std::span<Index const> undetermined);
  Status status(Index v) const noexcept;

  StrongConnections const& graph() const noexcept { return *s_; }

 private:
  friend SplitResult vertices_splitting(SplitState& state);

  StrongConnections const* s_;
  std::vector<unsigned> round_;     // epoch at which status_ was last set
  std::vector<Status> status_;
  std::vector<unsigned> frontier_;  // epoch stamp: queued in W-hat
  std::vector<unsigned> circle_;    // scratch stamp for S_i + {i}
  unsigned epoch_ = 0;
  unsigned circle_epoch_ = 0;
  std::vector<Index> undetermined_;
};

/// One greedy splitting round over the state's undetermined set.
SplitResult vertices_splitting(SplitState& state);

/// Convenience form: splits `undetermined` against the strong graph `s`.
SplitResult vertices_splitting(std::span<Index const> undetermined,
                               StrongConnections const& s);

/// Repeated splitting until every vertex has a color. `s` should be
/// symmetric (see symmetrize); the result is deterministic.
ColorPartition vertices_grouping(StrongConnections const& s);

/// strong_connections + symmetrize + vertices_grouping.
ColorPartition color_matrix(CsrMatrix const& a, double theta, int workers = 1);

struct PartitionCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct PartitionReport {
  std::vector<PartitionCheck> checks;
  Index colors = 0;
  Index max_influence = 0;

  bool passed() const noexcept;
};

/// Checks coverage (a), disjointness (b), strong independence inside each
/// group (c'), the color bound c <= max|S_i| + 1 on the symmetrized strong
/// graph, termination (c <= n) and, when theta == 0, that every principal
/// block A[V_l, V_l] is diagonal.
PartitionReport verify_partition(CsrMatrix const& a, double theta,
                                 std::vector<std::vector<Index>> const& groups);
PartitionReport verify_partition(CsrMatrix const& a, double theta,
                                 ColorPartition const& partition);

/// One line per color, space separated vertex indices.
void write_partition(std::ostream& out, ColorPartition const& p);
std::vector<std::vector<Index>> read_partition(std::istream& in);

}  // namespace ascpr
