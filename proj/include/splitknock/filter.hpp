#pragma once

#include "splitknock/types.hpp"

namespace splitknock {

struct ThresholdRule {
  double q = 0.2;
  bool plus = false;
};

// Knockoff(+) threshold over the candidate set {|W_j| != 0}; +inf when no
// candidate satisfies the ratio bound.
double threshold(const WVector& w, const ThresholdRule& rule);

SelectionReport select(const WVector& w, const ThresholdRule& rule);

// (fdp, power) of a selection against known truth; power is 0 when H1 is empty.
std::pair<double, double> fdp_power(const SelectionReport& report,
                                    const GroundTruth& truth);

struct AggregateSummary {
  double mean_fdr = 0.0;
  double mean_power = 0.0;
  double lo80_fdr = 0.0, hi80_fdr = 0.0;
  double lo80_power = 0.0, hi80_power = 0.0;
  double mfdr_proxy = 0.0;
};

// Means, empirical 10%/90% bands and the modified-FDR proxy
// mean(|S ∩ H0| / (|S| + 1/q)), where mfdr_terms carries the per-replicate
// |S ∩ H0| / (|S| + 1/q) values alongside the fdp/power lists.
AggregateSummary aggregate(const std::vector<double>& fdps,
                           const std::vector<double>& powers,
                           const std::vector<double>& mfdr_terms, double q);

double empirical_quantile(std::vector<double> values, double prob);

}  // namespace splitknock
