#include "splitknock/pairwise.hpp"

#include <cmath>

namespace splitknock {

namespace {

TransformMatrix difference_operator(Index p,
                                    const std::vector<std::pair<int, int>>& edges) {
  Matrix d = Matrix::Zero(static_cast<Index>(edges.size()), p);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    d(static_cast<Index>(e), edges[e].first) = 1.0;
    d(static_cast<Index>(e), edges[e].second) = -1.0;
  }
  return TransformMatrix::graph_difference(std::move(d));
}

}  // namespace

ComparisonGraph ComparisonGraph::full(Index p) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  return from_pairs(p, pairs);
}

ComparisonGraph ComparisonGraph::from_pairs(
    Index p, const std::vector<std::pair<int, int>>& pairs) {
  ComparisonGraph g;
  g.p = p;
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= p || j >= p || i >= j)
      throw UnknownEdge("edges must satisfy 0 <= i < j < p");
    if (g.edge_index.count({i, j})) throw UnknownEdge("duplicate edge");
    g.edge_index[{i, j}] = static_cast<int>(g.edges.size());
    g.edges.emplace_back(i, j);
  }
  if (g.edges.empty()) throw UnknownEdge("graph has no edges");
  g.d = difference_operator(p, g.edges);
  return g;
}

std::pair<int, int> ComparisonGraph::edge_of_row(
    const Eigen::Ref<const Vector>& row) const {
  if (row.size() != p) throw DimensionMismatch("row length does not match p");
  int plus = -1, minus = -1;
  for (Index k = 0; k < p; ++k) {
    if (row[k] == 1.0) {
      if (plus >= 0) throw UnknownEdge("row has two +1 entries");
      plus = static_cast<int>(k);
    } else if (row[k] == -1.0) {
      if (minus >= 0) throw UnknownEdge("row has two -1 entries");
      minus = static_cast<int>(k);
    } else if (row[k] != 0.0) {
      throw UnknownEdge("row entries must be 0/+1/-1");
    }
  }
  if (plus < 0 || minus < 0) throw UnknownEdge("row is not a signed pair");
  const int i = std::min(plus, minus);
  const int j = std::max(plus, minus);
  const auto it = edge_index.find({i, j});
  if (it == edge_index.end()) throw UnknownEdge("pair not present in the graph");
  return {it->second, plus < minus ? 1 : -1};
}

EdgeDistribution edge_distribution_from_data(const Dataset& ds,
                                             const ComparisonGraph& g) {
  if (ds.task != Task::PairwiseBinary)
    throw InvalidResponseDomain("edge distribution needs a pairwise dataset");
  EdgeDistribution dist;
  dist.probs = Vector::Zero(g.m());
  for (Index i = 0; i < ds.n(); ++i) {
    const auto [edge, sign] = g.edge_of_row(ds.x.row(i).transpose());
    (void)sign;
    dist.probs[edge] += 1.0;
  }
  dist.probs /= static_cast<double>(ds.n());
  return dist;
}

namespace {

struct ResampledRow {
  int edge = -1;   // -1 for the zero-augmented row
  double y01 = 0;  // response mapped to {0,1}, orientation already folded in
};

ResampledRow draw_data_row(const Dataset& ds, const ComparisonGraph& g, Rng& rng) {
  const Index r = static_cast<Index>(rng.uniform_index(ds.n()));
  const auto [edge, sign] = g.edge_of_row(ds.x.row(r).transpose());
  double y = ds.y[r];
  if (sign < 0) y = -y;  // canonical i<j orientation, response flipped
  return {edge, (y + 1.0) / 2.0};
}

int sample_edge(const Vector& probs, Rng& rng) {
  double u = rng.uniform();
  for (Index j = 0; j < probs.size(); ++j) {
    u -= probs[j];
    if (u < 0.0) return static_cast<int>(j);
  }
  return static_cast<int>(probs.size() - 1);
}

}  // namespace

LiftedDesign bootstrap_plus(const Dataset& ds, const ComparisonGraph& g,
                            Index n_r, Rng& rng) {
  validate_dataset(ds);
  if (n_r < 1) throw EmptyInput("n_r must be at least 1");
  const EdgeDistribution dist = edge_distribution_from_data(ds, g);
  const Index m = g.m();

  LiftedDesign out;
  out.x_tilde = Matrix::Zero(n_r, g.p);
  out.a = Matrix::Zero(n_r, m);
  out.a_tilde = Matrix::Zero(n_r, m);
  out.y.resize(n_r);
  for (Index r = 0; r < n_r; ++r) {
    if (rng.bernoulli(0.5)) {
      // Augmented zero row: y uniform on {-1,+1}, a = 0, a_tilde one-hot.
      out.y[r] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      out.a_tilde(r, sample_edge(dist.probs, rng)) = 1.0;
    } else {
      const ResampledRow row = draw_data_row(ds, g, rng);
      out.y[r] = row.y01;
      out.a(r, row.edge) = 1.0;
    }
  }
  return out;
}

LiftedDesign sequential_copies(const Dataset& ds, const ComparisonGraph& g,
                               Index n_r, Rng& rng, bool augment) {
  validate_dataset(ds);
  if (n_r < 1) throw EmptyInput("n_r must be at least 1");
  const EdgeDistribution dist = edge_distribution_from_data(ds, g);
  const Index m = g.m();

  LiftedDesign out;
  out.x_tilde = Matrix::Zero(n_r, g.p);
  out.a = Matrix::Zero(n_r, m);
  out.a_tilde = Matrix::Zero(n_r, m);
  out.y.resize(n_r);

  for (Index r = 0; r < n_r; ++r) {
    int edge = -1;
    if (augment && rng.bernoulli(0.5)) {
      out.y[r] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    } else {
      const ResampledRow row = draw_data_row(ds, g, rng);
      edge = row.edge;
      out.y[r] = row.y01;
      out.a(r, edge) = 1.0;
    }

    // Coordinate loop of the sequential construction. The conditional
    // P(A_j = 1 | A_{-j}, A~_{1:j-1}) for the one-hot (optionally
    // zero-augmented) law reduces to exact Bayesian filtering over the two
    // hypotheses left open when A_{-j} is all zero: A = e_j versus A = 0.
    double lik_zero = 1.0;    // likelihood of a_tilde_{1:j-1} under A = 0
    bool any_tilde = false;   // any a_tilde_k = 1 so far kills A = e_j
    for (Index j = 0; j < m; ++j) {
      const bool others_zero = (edge < 0) || (edge == static_cast<int>(j));
      double prob;
      if (!augment) {
        prob = others_zero ? 1.0 : 0.0;
      } else if (!others_zero) {
        prob = 0.0;
      } else {
        const double lik_ej = any_tilde ? 0.0 : 1.0;
        const double num = 0.5 * dist.probs[j] * lik_ej;
        prob = num / (num + 0.5 * lik_zero);
      }
      const bool tilde_j = prob > 0.0 && rng.bernoulli(prob);
      if (tilde_j) out.a_tilde(r, j) = 1.0;
      // Kernel value under the A = 0 hypothesis equals prob computed with
      // others_zero = true; recompute it when the realized A pinned prob to 0.
      if (augment) {
        double prob0;
        if (others_zero) {
          prob0 = prob;
        } else {
          const double lik_ej = any_tilde ? 0.0 : 1.0;
          const double num = 0.5 * dist.probs[j] * lik_ej;
          prob0 = num / (num + 0.5 * lik_zero);
        }
        lik_zero *= tilde_j ? prob0 : (1.0 - prob0);
      }
      any_tilde = any_tilde || tilde_j;
    }
  }
  return out;
}

}  // namespace splitknock
