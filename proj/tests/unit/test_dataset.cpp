// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "odor/dataset.hpp"

using namespace odor;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = (std::filesystem::temp_directory_path() /
            ("odor_test_" + std::to_string(counter++) + ".csv"))
               .string();
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("load_dataset_csv parses rows and splits labels on semicolons") {
  const TempFile file(
      "smiles,labels\n"
      "CCO,fruity;sweet\n"
      "c1ccccc1,aromatic\n");
  const std::vector<RawRecord> rows = load_dataset_csv(file.path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].row == 1);
  CHECK(rows[0].smiles == "CCO");
  REQUIRE(rows[0].labels.size() == 2);
  CHECK(rows[0].labels[0] == "fruity");
  CHECK(rows[0].labels[1] == "sweet");
  CHECK(rows[1].labels.size() == 1);
}

TEST_CASE("load_dataset_csv handles quoted fields and blank lines") {
  const TempFile file(
      "smiles,labels\n"
      "\"CCO\",\"fruity;fresh, green\"\n"
      "\n"
      "CC,solvent\n");
  const std::vector<RawRecord> rows = load_dataset_csv(file.path);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].labels.size() == 2);
  CHECK(rows[0].labels[1] == "fresh, green");
}

TEST_CASE("load_dataset_csv rejects a bad header with the line number") {
  const TempFile file("smile,label\nCCO,x\n");
  CHECK_THROWS_AS(load_dataset_csv(file.path), MalformedCsv);
}

TEST_CASE("load_dataset_csv reports missing files") {
  CHECK_THROWS_AS(load_dataset_csv("/nonexistent/odor.csv"), IoError);
}

TEST_CASE("clean_dataset keeps parseable labeled rows and explains drops") {
  std::vector<RawRecord> rows;
  rows.push_back({1, "CCO", {"fruity"}});
  rows.push_back({2, "", {"sweet"}});
  rows.push_back({3, "C1CC", {"green"}});
  rows.push_back({4, "CC", {}});

  const CleanResult result = clean_dataset(rows);
  CHECK(result.kept.size() + result.dropped.size() == rows.size());
  REQUIRE(result.kept.size() == 1);
  CHECK(result.kept[0].smiles == "CCO");
  REQUIRE(result.dropped.size() == 3);
  CHECK(result.dropped[0].row == 2);
  CHECK(result.dropped[0].reason == "missing SMILES");
  CHECK(result.dropped[1].row == 3);
  CHECK(result.dropped[1].reason.find("parse error") == 0);
  CHECK(result.dropped[2].reason == "no labels");
}

TEST_CASE("clean_dataset never mutates kept rows") {
  std::vector<RawRecord> rows;
  rows.push_back({1, "CCO", {"fruity", "sweet"}});
  const CleanResult result = clean_dataset(rows);
  REQUIRE(result.kept.size() == 1);
  CHECK(result.kept[0].row == rows[0].row);
  CHECK(result.kept[0].smiles == rows[0].smiles);
  CHECK(result.kept[0].labels == rows[0].labels);
}

TEST_CASE("cleaning report is a row,reason CSV") {
  std::vector<RawRecord> rows;
  rows.push_back({1, "", {"x"}});
  const CleanResult result = clean_dataset(rows);

  const std::string path =
      (std::filesystem::temp_directory_path() / "odor_report_test.csv").string();
  write_cleaning_report(path, result);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == "row,reason");
  CHECK(line == "1,missing SMILES");
  std::remove(path.c_str());
}
