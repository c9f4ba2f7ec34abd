#include "splitknock/types.hpp"

#include <cmath>

namespace splitknock {

TransformMatrix TransformMatrix::identity(Index p) {
  return TransformMatrix{Matrix::Identity(p, p), TransformKind::Identity};
}

TransformMatrix TransformMatrix::graph_difference(Matrix d) {
  TransformMatrix t{std::move(d), TransformKind::GraphDifference};
  t.validate();
  return t;
}

void TransformMatrix::validate() const {
  if (rows() < 1 || cols() < 1)
    throw DimensionMismatch("transform must be at least 1x1");
  if (!d.allFinite()) throw NonFiniteInput("transform has non-finite entries");
  if (kind == TransformKind::GraphDifference) {
    for (Index i = 0; i < rows(); ++i) {
      int plus = 0, minus = 0;
      for (Index j = 0; j < cols(); ++j) {
        const double v = d(i, j);
        if (v == 1.0)
          ++plus;
        else if (v == -1.0)
          ++minus;
        else if (v != 0.0)
          throw MalformedComparisonRow("graph difference entries must be 0/+1/-1");
      }
      if (plus != 1 || minus != 1)
        throw MalformedComparisonRow("graph difference row needs one +1 and one -1");
    }
  }
}

void validate_dataset(const Dataset& ds) {
  if (ds.n() < 1 || ds.p() < 1)
    throw DimensionMismatch("dataset must have at least one row and column");
  if (ds.y.size() != ds.n())
    throw DimensionMismatch("response length does not match design rows");
  if (!ds.x.allFinite() || !ds.y.allFinite())
    throw NonFiniteInput("dataset has non-finite entries");
  if (ds.task == Task::LogisticRegression) {
    for (Index i = 0; i < ds.n(); ++i)
      if (ds.y[i] != 0.0 && ds.y[i] != 1.0)
        throw InvalidResponseDomain("logistic response must be in {0,1}");
  } else if (ds.task == Task::PairwiseBinary) {
    for (Index i = 0; i < ds.n(); ++i) {
      if (ds.y[i] != -1.0 && ds.y[i] != 1.0)
        throw InvalidResponseDomain("pairwise response must be in {-1,+1}");
      int plus = 0, minus = 0;
      for (Index j = 0; j < ds.p(); ++j) {
        const double v = ds.x(i, j);
        if (v == 1.0)
          ++plus;
        else if (v == -1.0)
          ++minus;
        else if (v != 0.0)
          throw MalformedComparisonRow("pairwise row entries must be 0/+1/-1");
      }
      if (plus != 1 || minus != 1)
        throw MalformedComparisonRow("pairwise row needs exactly one +1 and one -1");
    }
  }
}

GroundTruth GroundTruth::from_beta(const TransformMatrix& d, const Vector& beta) {
  GroundTruth t;
  t.beta_star = beta;
  t.gamma_star = gamma_from_beta(d, beta);
  for (Index j = 0; j < t.gamma_star.size(); ++j)
    if (t.gamma_star[j] != 0.0) t.h1.push_back(static_cast<int>(j));
  return t;
}

Vector gamma_from_beta(const TransformMatrix& d, const Vector& beta) {
  if (d.cols() != beta.size())
    throw DimensionMismatch("transform columns do not match beta length");
  return d.d * beta;
}

}  // namespace splitknock
