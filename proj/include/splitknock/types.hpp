#pragma once

#include <Eigen/Dense>
#include <vector>

#include "splitknock/errors.hpp"

namespace splitknock {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class TransformKind { General, Identity, GraphDifference };

// Deterministic m x p transformation defining gamma = D beta.
struct TransformMatrix {
  Matrix d;
  TransformKind kind = TransformKind::General;

  Index rows() const { return d.rows(); }
  Index cols() const { return d.cols(); }

  static TransformMatrix identity(Index p);
  // Validates the one +1 / one -1 row structure.
  static TransformMatrix graph_difference(Matrix d);

  void validate() const;
};

enum class Task { LinearRegression, LogisticRegression, PairwiseBinary };

struct Dataset {
  Matrix x;   // n x p design rows
  Vector y;   // length n
  Task task = Task::LinearRegression;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
};

void validate_dataset(const Dataset& ds);

// Knockoff-augmented design: rows of (x_tilde, a, a_tilde) plus response.
// x_tilde + a * D recovers the originating X rows for Gaussian constructions;
// x_tilde is identically zero for bootstrap+.
struct LiftedDesign {
  Matrix x_tilde;  // n x p
  Matrix a;        // n x m
  Matrix a_tilde;  // n x m
  Vector y;        // length n (may be empty when the response is attached later)

  Index n() const { return a.rows(); }
  Index p() const { return x_tilde.cols(); }
  Index m() const { return a.cols(); }
};

struct GroundTruth {
  Vector beta_star;
  Vector gamma_star;
  std::vector<int> h1;  // support of gamma_star

  static GroundTruth from_beta(const TransformMatrix& d, const Vector& beta);
};

struct WVector {
  Vector w;
  Index m() const { return w.size(); }
};

struct SelectionReport {
  double threshold = 0.0;  // +inf when nothing qualifies
  std::vector<int> selected;
  double q = 0.0;
  bool plus = false;
};

// gamma = D * beta.
Vector gamma_from_beta(const TransformMatrix& d, const Vector& beta);

}  // namespace splitknock
