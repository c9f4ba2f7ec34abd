#pragma once

#include <string>
#include <vector>

#include "splitknock/simlab.hpp"
#include "splitknock/types.hpp"

namespace splitknock {

// Deterministic number formatting shared by every CSV/SVG writer
// ("%.10g": shortest-ish, locale-independent, '.' decimal point).
std::string format_number(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// n,rep,fdp,power,selected_count,wall_ms
std::string replicates_csv(const std::vector<ReplicateRow>& rows);
// n,mean_fdr,lo80,hi80,mean_power,plo80,phi80
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

// Numeric matrix, comma-separated, no header.
Matrix read_matrix_csv(const std::string& path);

// Pairwise comparison file: header `item_i,item_j,winner`, string item names,
// winner must equal one of the two items. Returns named items plus signed-pair
// design rows (+1 at i, -1 at j, y = +1 iff item_i won).
struct ComparisonsData {
  std::vector<std::string> items;
  Dataset ds;  // task = PairwiseBinary
};
ComparisonsData read_comparisons_csv(const std::string& path);

// item_i,item_j,selection_frequency (rows follow the graph's edge order).
std::string pairs_selected_csv(const std::vector<std::string>& items,
                               const std::vector<std::pair<int, int>>& edges,
                               const std::vector<double>& frequency);

// j,kl_hat,bound
std::string kl_report_csv(const Vector& kl, const Vector& bound);

// Two-panel FDR/power line plot with translucent 80% bands; pure string
// templating over the aggregate rows (viewBox 800x500).
std::string fdr_power_svg(const std::vector<AggregateRow>& split_rows,
                          const std::vector<AggregateRow>& baseline_rows,
                          double q);

}  // namespace splitknock
