#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "splitknock/io.hpp"

using namespace splitknock;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/splitknock_io_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("number formatting is compact and deterministic") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.25) == "0.25");
    CHECK(format_number(-3.5) == "-3.5");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
  }

  TEST_CASE("replicate CSV header and rows") {
    std::vector<ReplicateRow> rows(2);
    rows[0] = {500, 0, 0.25, 1.0, 4, 12.5, 0.1};
    rows[1] = {500, 1, 0.0, 0.5, 2, 10.0, 0.0};
    const std::string csv = replicates_csv(rows);
    CHECK(csv.rfind("n,rep,fdp,power,selected_count,wall_ms\n", 0) == 0);
    CHECK(csv.find("500,0,0.25,1,4,12.5\n") != std::string::npos);
    CHECK(csv.find("500,1,0,0.5,2,10\n") != std::string::npos);
  }

  TEST_CASE("aggregate CSV header and rows") {
    AggregateRow row;
    row.n = 1000;
    row.summary.mean_fdr = 0.2;
    row.summary.lo80_fdr = 0.0;
    row.summary.hi80_fdr = 0.5;
    row.summary.mean_power = 0.75;
    row.summary.lo80_power = 0.5;
    row.summary.hi80_power = 1.0;
    const std::string csv = aggregate_csv({row});
    CHECK(csv == "n,mean_fdr,lo80,hi80,mean_power,plo80,phi80\n"
                 "1000,0.2,0,0.5,0.75,0.5,1\n");
  }

  TEST_CASE("matrix CSV round trip") {
    const TempFile f("mat.csv", "1,2.5,-3\n0.125,0,7\n");
    const Matrix m = read_matrix_csv(f.path);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m(0, 1) == 2.5);
    CHECK(m(1, 0) == 0.125);
    CHECK(m(1, 2) == 7.0);
  }

  TEST_CASE("matrix CSV errors carry line numbers") {
    const TempFile ragged("ragged.csv", "1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_matrix_csv(ragged.path),
                         doctest::Contains("line 2"), IoError);
    const TempFile junk("junk.csv", "1,apple\n");
    CHECK_THROWS_AS(read_matrix_csv(junk.path), IoError);
    CHECK_THROWS_AS(read_matrix_csv("/tmp/definitely_missing_file.csv"),
                    IoError);
  }

  TEST_CASE("comparisons CSV parses names and orientations") {
    const TempFile f("cmp.csv",
                     "item_i,item_j,winner\n"
                     "alice,bob,alice\n"
                     "bob,carol,carol\n"
                     "alice,carol,alice\n");
    const ComparisonsData data = read_comparisons_csv(f.path);
    REQUIRE(data.items.size() == 3);
    CHECK(data.items[0] == "alice");
    CHECK(data.items[1] == "bob");
    CHECK(data.items[2] == "carol");
    REQUIRE(data.ds.n() == 3);
    CHECK(data.ds.task == Task::PairwiseBinary);
    // Row 1: alice beat bob -> +1 at alice, -1 at bob, y=+1.
    CHECK(data.ds.x(0, 0) == 1.0);
    CHECK(data.ds.x(0, 1) == -1.0);
    CHECK(data.ds.y[0] == 1.0);
    // Row 2: bob vs carol, carol won -> y=-1 under the (bob, carol) orientation.
    CHECK(data.ds.x(1, 1) == 1.0);
    CHECK(data.ds.x(1, 2) == -1.0);
    CHECK(data.ds.y[1] == -1.0);
  }

  TEST_CASE("comparisons CSV malformed rows carry line numbers") {
    const TempFile self("self.csv", "item_i,item_j,winner\na,a,a\n");
    CHECK_THROWS_WITH_AS(read_comparisons_csv(self.path),
                         doctest::Contains("line 2"), MalformedComparisonRow);

    const TempFile badwin("badwin.csv", "item_i,item_j,winner\na,b,c\n");
    CHECK_THROWS_AS(read_comparisons_csv(badwin.path), MalformedComparisonRow);

    const TempFile fields("fields.csv", "item_i,item_j,winner\na,b\n");
    CHECK_THROWS_AS(read_comparisons_csv(fields.path), MalformedComparisonRow);

    const TempFile header("header.csv", "i,j,w\na,b,a\n");
    CHECK_THROWS_AS(read_comparisons_csv(header.path), MalformedComparisonRow);
  }

  TEST_CASE("selected-pairs CSV") {
    const std::string csv = pairs_selected_csv(
        {"a", "b", "c"}, {{0, 1}, {0, 2}, {1, 2}}, {0.5, 0.0, 1.0});
    CHECK(csv == "item_i,item_j,selection_frequency\n"
                 "a,b,0.5\n"
                 "a,c,0\n"
                 "b,c,1\n");
  }

  TEST_CASE("KL report CSV is 1-indexed") {
    Vector kl(2), bound(2);
    kl << 0.5, 1.5;
    bound << 2.0, 2.0;
    CHECK(kl_report_csv(kl, bound) == "j,kl_hat,bound\n1,0.5,2\n2,1.5,2\n");
  }

  TEST_CASE("SVG plot contains the expected structure") {
    AggregateRow row;
    row.n = 500;
    row.summary.mean_fdr = 0.2;
    row.summary.hi80_fdr = 0.4;
    row.summary.mean_power = 0.5;
    row.summary.hi80_power = 0.9;
    AggregateRow row2 = row;
    row2.n = 2000;
    row2.summary.mean_power = 0.9;
    const std::string svg = fdr_power_svg({row, row2}, {}, 0.2);
    CHECK(svg.find("viewBox=\"0 0 800 500\"") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("fill-opacity") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // q reference
    CHECK(svg.rfind("</svg>") != std::string::npos);

    // Baseline rows add a second pair of curves.
    const std::string with_base = fdr_power_svg({row, row2}, {row, row2}, 0.2);
    CHECK(with_base.size() > svg.size());
  }

  TEST_CASE("text file round trip") {
    const std::string path = "/tmp/splitknock_io_test_roundtrip.txt";
    write_text_file(path, "hello\nworld\n");
    CHECK(read_text_file(path) == "hello\nworld\n");
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_text_file(path), IoError);
  }
}
