#pragma once

#include <map>
#include <utility>
#include <vector>

#include "splitknock/rng.hpp"
#include "splitknock/types.hpp"

namespace splitknock {

// Graph of compared items; D is the graph difference operator with +1 at i and
// -1 at j for each edge (i, j), i < j.
struct ComparisonGraph {
  Index p = 0;
  std::vector<std::pair<int, int>> edges;
  std::map<std::pair<int, int>, int> edge_index;
  TransformMatrix d;

  Index m() const { return static_cast<Index>(edges.size()); }

  static ComparisonGraph full(Index p);
  static ComparisonGraph from_pairs(Index p,
                                    const std::vector<std::pair<int, int>>& pairs);

  // Maps a +1/-1 comparison row to (edge index, orientation sign); sign is -1
  // for rows stored as e_j - e_i with j > i.
  std::pair<int, int> edge_of_row(const Eigen::Ref<const Vector>& row) const;
};

struct EdgeDistribution {
  Vector probs;  // probs_j = P(A = e_j | A != 0)
};

EdgeDistribution edge_distribution_from_data(const Dataset& ds,
                                             const ComparisonGraph& g);

// Zero-augmented bootstrap resampling producing exactly exchangeable one-hot
// (a, a_tilde) rows with x_tilde identically zero. Responses come out mapped
// to {0,1}.
LiftedDesign bootstrap_plus(const Dataset& ds, const ComparisonGraph& g,
                            Index n_r, Rng& rng);

// Coordinate-by-coordinate knockoff generation: a_tilde_j is drawn from the
// exact conditional law of a_j given (a_{-j}, a_tilde_{1:j-1}), computed in
// closed form for the one-hot design. With augment=false (the default) the
// resampled rows are used as-is.
LiftedDesign sequential_copies(const Dataset& ds, const ComparisonGraph& g,
                               Index n_r, Rng& rng, bool augment = false);

}  // namespace splitknock
