// SPDX-License-Identifier: Apache-2.0

#include "odor/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "odor/smiles.hpp"

namespace odor {

namespace {

// RFC 4180 style field splitting: quotes, doubled quotes, embedded commas.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (in_quotes) throw MalformedCsv("unterminated quoted field", line_no);
  fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_labels(const std::string& field) {
  std::vector<std::string> labels;
  std::stringstream ss(field);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) labels.push_back(item);
  }
  return labels;
}

}  // namespace

std::vector<RawRecord> load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv("missing header row", 1);
  // Tolerate a UTF-8 BOM.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_csv_line(line, 1);
  if (header.size() < 2 || trim(header[0]) != "smiles" || trim(header[1]) != "labels") {
    throw MalformedCsv("expected header 'smiles,labels'", 1);
  }

  std::vector<RawRecord> rows;
  std::size_t line_no = 1;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line, line_no);
    if (fields.size() < 2) throw MalformedCsv("expected two fields", line_no);
    RawRecord rec;
    rec.row = ++row_no;
    rec.smiles = trim(fields[0]);
    rec.labels = split_labels(fields[1]);
    rows.push_back(std::move(rec));
  }
  return rows;
}

CleanResult clean_dataset(const std::vector<RawRecord>& rows) {
  CleanResult result;
  for (const RawRecord& rec : rows) {
    if (rec.smiles.empty()) {
      result.dropped.push_back({rec.row, "missing SMILES"});
      continue;
    }
    if (rec.labels.empty()) {
      result.dropped.push_back({rec.row, "no labels"});
      continue;
    }
    try {
      parse_smiles(rec.smiles);
    } catch (const ParseError& err) {
      result.dropped.push_back(
          {rec.row, std::string("parse error: ") + err.what()});
      continue;
    }
    result.kept.push_back(rec);
  }
  return result;
}

void write_cleaning_report(const std::string& path, const CleanResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cleaning report: " + path);
  out << "row,reason\n";
  for (const DropReason& drop : result.dropped) {
    std::string reason = drop.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out << drop.row << "," << reason << "\n";
  }
}

}  // namespace odor
