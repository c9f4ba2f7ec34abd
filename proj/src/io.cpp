#include "splitknock/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace splitknock {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

}  // namespace

std::string replicates_csv(const std::vector<ReplicateRow>& rows) {
  std::string out = "n,rep,fdp,power,selected_count,wall_ms\n";
  for (const ReplicateRow& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.rep) + "," +
           format_number(r.fdp) + "," + format_number(r.power) + "," +
           std::to_string(r.selected_count) + "," + format_number(r.wall_ms) +
           "\n";
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "n,mean_fdr,lo80,hi80,mean_power,plo80,phi80\n";
  for (const AggregateRow& r : rows) {
    out += std::to_string(r.n) + "," + format_number(r.summary.mean_fdr) + "," +
           format_number(r.summary.lo80_fdr) + "," +
           format_number(r.summary.hi80_fdr) + "," +
           format_number(r.summary.mean_power) + "," +
           format_number(r.summary.lo80_power) + "," +
           format_number(r.summary.hi80_power) + "\n";
  }
  return out;
}

Matrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const std::string& f : split_csv_line(line)) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw IoError(path + ": line " + std::to_string(line_no) +
                      ": not a number: '" + f + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ": line " + std::to_string(line_no) +
                    ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput(path + ": no data rows");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

ComparisonsData read_comparisons_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<std::array<std::string, 3>> records;
  ComparisonsData data;
  std::map<std::string, int> index_of;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (!header_seen) {
      if (f.size() != 3 || f[0] != "item_i" || f[1] != "item_j" ||
          f[2] != "winner")
        throw MalformedComparisonRow(
            path + ": line " + std::to_string(line_no) +
            ": expected header 'item_i,item_j,winner'");
      header_seen = true;
      continue;
    }
    if (f.size() != 3 || f[0].empty() || f[1].empty())
      throw MalformedComparisonRow(path + ": line " + std::to_string(line_no) +
                                   ": expected 3 fields");
    if (f[0] == f[1])
      throw MalformedComparisonRow(path + ": line " + std::to_string(line_no) +
                                   ": item compared with itself");
    if (f[2] != f[0] && f[2] != f[1])
      throw MalformedComparisonRow(path + ": line " + std::to_string(line_no) +
                                   ": winner must be one of the two items");
    for (int c = 0; c < 2; ++c)
      if (!index_of.count(f[c])) {
        index_of[f[c]] = static_cast<int>(data.items.size());
        data.items.push_back(f[c]);
      }
    records.push_back({f[0], f[1], f[2]});
  }
  if (records.empty()) throw EmptyInput(path + ": no comparison rows");

  const Index n = static_cast<Index>(records.size());
  const Index p = static_cast<Index>(data.items.size());
  data.ds.task = Task::PairwiseBinary;
  data.ds.x = Matrix::Zero(n, p);
  data.ds.y.resize(n);
  for (Index r = 0; r < n; ++r) {
    const int i = index_of[records[r][0]];
    const int j = index_of[records[r][1]];
    data.ds.x(r, i) = 1.0;
    data.ds.x(r, j) = -1.0;
    data.ds.y[r] = records[r][2] == records[r][0] ? 1.0 : -1.0;
  }
  return data;
}

std::string pairs_selected_csv(const std::vector<std::string>& items,
                               const std::vector<std::pair<int, int>>& edges,
                               const std::vector<double>& frequency) {
  if (edges.size() != frequency.size())
    throw DimensionMismatch("one frequency per edge required");
  std::string out = "item_i,item_j,selection_frequency\n";
  for (std::size_t e = 0; e < edges.size(); ++e)
    out += items.at(static_cast<std::size_t>(edges[e].first)) + "," +
           items.at(static_cast<std::size_t>(edges[e].second)) + "," +
           format_number(frequency[e]) + "\n";
  return out;
}

std::string kl_report_csv(const Vector& kl, const Vector& bound) {
  if (kl.size() != bound.size())
    throw DimensionMismatch("kl and bound lengths differ");
  std::string out = "j,kl_hat,bound\n";
  for (Index j = 0; j < kl.size(); ++j)
    out += std::to_string(j + 1) + "," + format_number(kl[j]) + "," +
           format_number(bound[j]) + "\n";
  return out;
}

namespace {

struct Panel {
  double x0, y0, w, h;  // plot area in SVG user units
  double nmin, nmax, vmin, vmax;

  double px(double n) const {
    return nmax > nmin ? x0 + (n - nmin) / (nmax - nmin) * w : x0 + w / 2;
  }
  double py(double v) const { return y0 + h - (v - vmin) / (vmax - vmin) * h; }
};

std::string polyline(const Panel& pn, const std::vector<AggregateRow>& rows,
                     double AggregateSummary::*field, const char* color) {
  std::string pts;
  for (const AggregateRow& r : rows)
    pts += format_number(pn.px(static_cast<double>(r.n))) + "," +
           format_number(pn.py(r.summary.*field)) + " ";
  return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
}

std::string band(const Panel& pn, const std::vector<AggregateRow>& rows,
                 double AggregateSummary::*lo, double AggregateSummary::*hi,
                 const char* color) {
  std::string pts;
  for (const AggregateRow& r : rows)
    pts += format_number(pn.px(static_cast<double>(r.n))) + "," +
           format_number(pn.py(r.summary.*hi)) + " ";
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    pts += format_number(pn.px(static_cast<double>(it->n))) + "," +
           format_number(pn.py(it->summary.*lo)) + " ";
  return "<polygon fill=\"" + std::string(color) +
         "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"" + pts + "\"/>\n";
}

std::string axes(const Panel& pn, const std::string& title,
                 const std::vector<AggregateRow>& rows) {
  std::string s;
  s += "<rect x=\"" + format_number(pn.x0) + "\" y=\"" + format_number(pn.y0) +
       "\" width=\"" + format_number(pn.w) + "\" height=\"" +
       format_number(pn.h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  s += "<text x=\"" + format_number(pn.x0 + pn.w / 2) + "\" y=\"" +
       format_number(pn.y0 - 12) +
       "\" text-anchor=\"middle\" font-size=\"16\">" + title + "</text>\n";
  for (double v = 0.0; v <= 1.0001; v += 0.25) {
    s += "<text x=\"" + format_number(pn.x0 - 8) + "\" y=\"" +
         format_number(pn.py(v) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + format_number(v) +
         "</text>\n";
  }
  for (const AggregateRow& r : rows) {
    const double x = pn.px(static_cast<double>(r.n));
    s += "<text x=\"" + format_number(x) + "\" y=\"" +
         format_number(pn.y0 + pn.h + 16) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + std::to_string(r.n) +
         "</text>\n";
  }
  return s;
}

}  // namespace

std::string fdr_power_svg(const std::vector<AggregateRow>& split_rows,
                          const std::vector<AggregateRow>& baseline_rows,
                          double q) {
  if (split_rows.empty()) throw EmptyInput("no aggregate rows to plot");
  double nmin = static_cast<double>(split_rows.front().n);
  double nmax = nmin;
  for (const AggregateRow& r : split_rows) {
    nmin = std::min(nmin, static_cast<double>(r.n));
    nmax = std::max(nmax, static_cast<double>(r.n));
  }

  const Panel fdr{70, 50, 300, 380, nmin, nmax, 0.0, 1.0};
  const Panel pow{470, 50, 300, 380, nmin, nmax, 0.0, 1.0};

  std::string s =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
      "font-family=\"sans-serif\">\n<rect width=\"800\" height=\"500\" "
      "fill=\"white\"/>\n";
  s += axes(fdr, "FDR", split_rows);
  s += axes(pow, "Power", split_rows);

  // target-q reference line on the FDR panel
  s += "<line x1=\"" + format_number(fdr.x0) + "\" y1=\"" +
       format_number(fdr.py(q)) + "\" x2=\"" + format_number(fdr.x0 + fdr.w) +
       "\" y2=\"" + format_number(fdr.py(q)) +
       "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";

  s += band(fdr, split_rows, &AggregateSummary::lo80_fdr,
            &AggregateSummary::hi80_fdr, "#1f77b4");
  s += band(pow, split_rows, &AggregateSummary::lo80_power,
            &AggregateSummary::hi80_power, "#1f77b4");
  s += polyline(fdr, split_rows, &AggregateSummary::mean_fdr, "#1f77b4");
  s += polyline(pow, split_rows, &AggregateSummary::mean_power, "#1f77b4");

  if (!baseline_rows.empty()) {
    s += band(fdr, baseline_rows, &AggregateSummary::lo80_fdr,
              &AggregateSummary::hi80_fdr, "#d62728");
    s += band(pow, baseline_rows, &AggregateSummary::lo80_power,
              &AggregateSummary::hi80_power, "#d62728");
    s += polyline(fdr, baseline_rows, &AggregateSummary::mean_fdr, "#d62728");
    s += polyline(pow, baseline_rows, &AggregateSummary::mean_power, "#d62728");
    s += "<text x=\"400\" y=\"480\" text-anchor=\"middle\" font-size=\"12\" "
         "fill=\"#333\">blue: split knockoffs &#160;&#160; red: vanilla "
         "model-X</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace splitknock
