#include "splitknock/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace splitknock {

double threshold(const WVector& w, const ThresholdRule& rule) {
  if (rule.q <= 0.0 || rule.q >= 1.0) throw EmptyInput("q must be in (0,1)");
  std::set<double> candidates;
  for (Index j = 0; j < w.m(); ++j)
    if (w.w[j] != 0.0) candidates.insert(std::abs(w.w[j]));

  const double offset = rule.plus ? 1.0 : 0.0;
  for (double lam : candidates) {  // ascending unique values
    int neg = 0, pos = 0;
    for (Index j = 0; j < w.m(); ++j) {
      if (w.w[j] <= -lam) ++neg;
      if (w.w[j] >= lam) ++pos;
    }
    const double ratio = (offset + neg) / std::max(1, pos);
    if (ratio <= rule.q) return lam;
  }
  return std::numeric_limits<double>::infinity();
}

SelectionReport select(const WVector& w, const ThresholdRule& rule) {
  SelectionReport report;
  report.q = rule.q;
  report.plus = rule.plus;
  report.threshold = threshold(w, rule);
  if (std::isfinite(report.threshold))
    for (Index j = 0; j < w.m(); ++j)
      if (w.w[j] >= report.threshold) report.selected.push_back(static_cast<int>(j));
  return report;
}

std::pair<double, double> fdp_power(const SelectionReport& report,
                                    const GroundTruth& truth) {
  for (int j : report.selected)
    if (j < 0 || j >= truth.gamma_star.size())
      throw DimensionMismatch("selected index outside gamma range");
  int false_disc = 0, true_disc = 0;
  for (int j : report.selected) {
    if (truth.gamma_star[j] != 0.0)
      ++true_disc;
    else
      ++false_disc;
  }
  const double fdp =
      static_cast<double>(false_disc) /
      std::max<std::size_t>(report.selected.size(), 1);
  const double power =
      static_cast<double>(true_disc) / std::max<std::size_t>(truth.h1.size(), 1);
  return {fdp, power};
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw EmptyInput("quantile of empty list");
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

AggregateSummary aggregate(const std::vector<double>& fdps,
                           const std::vector<double>& powers,
                           const std::vector<double>& mfdr_terms, double q) {
  if (fdps.empty() || fdps.size() != powers.size() ||
      fdps.size() != mfdr_terms.size())
    throw EmptyInput("aggregate needs nonempty lists of equal length");
  if (q <= 0.0 || q >= 1.0) throw EmptyInput("q must be in (0,1)");
  AggregateSummary s;
  const double n = static_cast<double>(fdps.size());
  for (double v : fdps) s.mean_fdr += v;
  for (double v : powers) s.mean_power += v;
  for (double v : mfdr_terms) s.mfdr_proxy += v;
  s.mean_fdr /= n;
  s.mean_power /= n;
  s.mfdr_proxy /= n;
  s.lo80_fdr = empirical_quantile(fdps, 0.1);
  s.hi80_fdr = empirical_quantile(fdps, 0.9);
  s.lo80_power = empirical_quantile(powers, 0.1);
  s.hi80_power = empirical_quantile(powers, 0.9);
  return s;
}

}  // namespace splitknock
