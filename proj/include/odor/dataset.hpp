// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace odor {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class MalformedCsv : public std::runtime_error {
 public:
  MalformedCsv(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RawRecord {
  std::size_t row = 0;  // 1-based data row number in the source file
  std::string smiles;
  std::vector<std::string> labels;
};

struct DropReason {
  std::size_t row = 0;
  std::string reason;
};

struct CleanResult {
  std::vector<RawRecord> kept;
  std::vector<DropReason> dropped;
};

/// Reads a `smiles,labels` CSV; `labels` holds semicolon-separated descriptor
/// names. Quoted fields with embedded commas are handled.
std::vector<RawRecord> load_dataset_csv(const std::string& path);

/// Keeps rows whose SMILES parses and that carry at least one label. Never
/// throws for a bad row; every dropped row gets a machine-readable reason.
CleanResult clean_dataset(const std::vector<RawRecord>& rows);

/// Writes the `row,reason` cleaning report.
void write_cleaning_report(const std::string& path, const CleanResult& result);

}  // namespace odor
