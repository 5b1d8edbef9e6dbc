#pragma once

// Bundled measurement tables and CSV ingestion. The corpus stores, for each
// observed base field: the measured class-number exponents and unit types
// (the classifier inputs), the observed kernel-position string and class
// group of the first Hilbert p-class field, and the expected structural
// invariants (e, m, n, k) of the second p-class group, against which the
// classifier is regression-tested.
//
// Schema (exact header):
//   table,p,kind,disc,name,kappa,u,v,w,t1,t2,clF1,exp_e,exp_m,exp_n,exp_k,freq,label
// Fields are comma separated, UTF-8, RFC-4180 quoting for fields containing
// commas or quotes; an empty field means "absent". kind is complex|real;
// t1/t2 use a|d|- ; clF1 uses the dash format of AbelianGroup::to_string.
// Name superscripts are transliterated with '^' (one '^' per level). Rows
// sharing one printed frequency brace carry the total on the first row and
// the marker label "freq_group" on the others.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppg/arithmetic.hpp"

namespace ppg {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line_, int column_, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line_) + ", column " +
                           std::to_string(column_) + ": " + reason),
        line(line_),
        column(column_) {}
};

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct TableRow {
  std::string table_id;
  FieldRecord record;
  std::optional<int> expected_e, expected_m, expected_n, expected_k;
  std::optional<i64> frequency;
  std::string label;

  bool operator==(const TableRow&) const = default;
};

// Raw RFC-4180-style parsing into cells (exposed for tests). Lines split on
// '\n' with optional trailing '\r'; quoted cells may contain commas and
// doubled quotes.
std::vector<std::vector<std::string>> parse_csv_cells(const std::string& text);

std::vector<TableRow> rows_from_csv(const std::string& text);
std::vector<TableRow> load_csv(const std::string& path);
std::string serialize_csv(const std::vector<TableRow>& rows);

const std::string& bundled_tables_csv();
const std::vector<TableRow>& bundled_rows();
std::vector<TableRow> bundled_rows(const std::string& table_id);
std::vector<std::string> bundled_table_ids();

// Printed column sum of the source table, used as a checksum that the
// bundled corpus is complete (tables without a printed sum return nullopt).
std::optional<i64> expected_frequency_total(const std::string& table_id);

struct RowDiff {
  std::string table_id;
  std::string name;    // row identifier for messages
  std::vector<std::string> differences;
};

struct DiffReport {
  std::vector<RowDiff> diffs;
  // Sum of the frequency column per table id (absent fields contribute 0).
  std::vector<std::pair<std::string, i64>> frequency_totals;
  std::size_t rows_checked = 0;

  bool empty() const { return diffs.empty(); }
};

// Re-derives (m, n, e, k) and the order of Cl(F1) of every row from the
// measurement columns alone and diffs them against the expected columns.
DiffReport reproduce_tables(const std::vector<TableRow>& rows);
DiffReport reproduce_tables(const std::vector<std::string>& table_ids);

}  // namespace ppg
