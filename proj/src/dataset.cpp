#include "ppg/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ppg {

namespace {

const std::vector<std::string>& schema_header() {
  static const std::vector<std::string> header{
      "table", "p", "kind", "disc", "name",  "kappa", "u",     "v",     "w",
      "t1",    "t2", "clF1", "exp_e", "exp_m", "exp_n", "exp_k", "freq", "label"};
  return header;
}

i64 parse_integer(const std::string& cell, int line, int column) {
  if (cell.empty()) throw ParseError(line, column, "expected an integer, found an empty field");
  std::size_t pos = 0;
  i64 value = 0;
  try {
    value = std::stoll(cell, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, column, "malformed integer '" + cell + "'");
  }
  if (pos != cell.size())
    throw ParseError(line, column, "trailing characters in integer '" + cell + "'");
  return value;
}

std::optional<int> optional_int(const std::string& cell, int line, int column) {
  if (cell.empty()) return std::nullopt;
  const i64 v = parse_integer(cell, line, column);
  if (v < INT32_MIN || v > INT32_MAX) throw ParseError(line, column, "integer out of range");
  return static_cast<int>(v);
}

std::string quote_if_needed(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv_cells(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  int line = 1, column = 1;

  const auto end_cell = [&]() {
    row.push_back(cell);
    cell.clear();
    cell_was_quoted = false;
  };
  const auto end_line = [&]() {
    end_cell();
    // A completely empty physical line is skipped rather than yielding a
    // one-empty-cell row (files commonly end with a newline).
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(row);
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
          column += 2;
        } else {
          in_quotes = false;
          ++column;
        }
      } else if (c == '\n') {
        throw ParseError(line, column, "newline inside a quoted field");
      } else {
        cell += c;
        ++column;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty() || cell_was_quoted)
          throw ParseError(line, column, "quote in the middle of an unquoted field");
        in_quotes = true;
        cell_was_quoted = true;
        ++column;
        break;
      case ',':
        end_cell();
        ++column;
        break;
      case '\r':
        if (i + 1 >= text.size() || text[i + 1] != '\n')
          throw ParseError(line, column, "bare carriage return");
        break;
      case '\n':
        end_line();
        ++line;
        column = 1;
        break;
      default:
        if (cell_was_quoted)
          throw ParseError(line, column, "content after a closing quote");
        cell += c;
        ++column;
    }
  }
  if (in_quotes) throw ParseError(line, column, "unterminated quoted field");
  if (!cell.empty() || !row.empty()) end_line();
  return rows;
}

std::vector<TableRow> rows_from_csv(const std::string& text) {
  const std::vector<std::vector<std::string>> cells = parse_csv_cells(text);
  if (cells.empty()) return {};
  if (cells.front() != schema_header()) {
    std::ostringstream msg;
    msg << "header mismatch; expected '";
    for (std::size_t i = 0; i < schema_header().size(); ++i) {
      if (i) msg << ',';
      msg << schema_header()[i];
    }
    msg << "'";
    throw SchemaError(msg.str());
  }

  std::vector<TableRow> rows;
  for (std::size_t r = 1; r < cells.size(); ++r) {
    const auto& c = cells[r];
    const int line = static_cast<int>(r) + 1;
    if (c.size() != schema_header().size())
      throw SchemaError("line " + std::to_string(line) + ": expected " +
                        std::to_string(schema_header().size()) + " fields, found " +
                        std::to_string(c.size()));
    TableRow row;
    int col = 1;
    try {
      row.table_id = c[0];
      if (row.table_id.empty()) throw ParseError(line, 1, "empty table id");
      col = 2;
      row.record.p = static_cast<int>(parse_integer(c[1], line, 2));
      col = 3;
      row.record.kind = kind_from_name(c[2]);
      col = 4;
      if (!c[3].empty()) row.record.discriminant = parse_integer(c[3], line, 4);
      col = 5;
      if (!c[4].empty()) row.record.name = c[4];
      col = 6;
      if (!c[5].empty()) row.record.kappa = c[5];
      col = 7;
      row.record.u = optional_int(c[6], line, 7);
      col = 8;
      row.record.v = optional_int(c[7], line, 8);
      col = 9;
      row.record.w = optional_int(c[8], line, 9);
      col = 10;
      row.record.t1 = unit_type_from_name(c[9]);
      col = 11;
      row.record.t2 = unit_type_from_name(c[10]);
      col = 12;
      if (!c[11].empty()) {
        AbelianGroup::parse(c[11]);  // validate the dash format
        row.record.clF1 = c[11];
      }
      col = 13;
      row.expected_e = optional_int(c[12], line, 13);
      col = 14;
      row.expected_m = optional_int(c[13], line, 14);
      col = 15;
      row.expected_n = optional_int(c[14], line, 15);
      col = 16;
      row.expected_k = optional_int(c[15], line, 16);
      col = 17;
      if (!c[16].empty()) row.frequency = parse_integer(c[16], line, 17);
      col = 18;
      row.label = c[17];
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line, col, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TableRow> load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return rows_from_csv(buffer.str());
}

std::string serialize_csv(const std::vector<TableRow>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < schema_header().size(); ++i) {
    if (i) out << ',';
    out << schema_header()[i];
  }
  out << '\n';
  const auto opt_int = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& row : rows) {
    std::vector<std::string> cells(schema_header().size());
    cells[0] = row.table_id;
    cells[1] = std::to_string(row.record.p);
    cells[2] = kind_name(row.record.kind);
    cells[3] = row.record.discriminant ? std::to_string(*row.record.discriminant) : "";
    cells[4] = row.record.name.value_or("");
    cells[5] = row.record.kappa.value_or("");
    cells[6] = opt_int(row.record.u);
    cells[7] = opt_int(row.record.v);
    cells[8] = opt_int(row.record.w);
    cells[9] = row.record.t1 == UnitType::Unknown ? "-" : std::string(1, unit_type_name(row.record.t1)[0]);
    cells[10] = row.record.t2 == UnitType::Unknown ? "-" : std::string(1, unit_type_name(row.record.t2)[0]);
    cells[11] = row.record.clF1.value_or("");
    cells[12] = opt_int(row.expected_e);
    cells[13] = opt_int(row.expected_m);
    cells[14] = opt_int(row.expected_n);
    cells[15] = opt_int(row.expected_k);
    cells[16] = row.frequency ? std::to_string(*row.frequency) : "";
    cells[17] = row.label;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << quote_if_needed(cells[i]);
    }
    out << '\n';
  }
  return out.str();
}

const std::vector<TableRow>& bundled_rows() {
  static const std::vector<TableRow> rows = rows_from_csv(bundled_tables_csv());
  return rows;
}

std::vector<TableRow> bundled_rows(const std::string& table_id) {
  std::vector<TableRow> out;
  for (const auto& row : bundled_rows())
    if (row.table_id == table_id) out.push_back(row);
  return out;
}

std::vector<std::string> bundled_table_ids() {
  std::vector<std::string> out;
  for (const auto& row : bundled_rows())
    if (std::find(out.begin(), out.end(), row.table_id) == out.end())
      out.push_back(row.table_id);
  return out;
}

std::optional<i64> expected_frequency_total(const std::string& table_id) {
  if (table_id == "table2") return 2303;
  if (table_id == "table3") return 2020;
  if (table_id == "table4") return 206;
  if (table_id == "table5") return 67;
  return std::nullopt;
}

namespace {

void diff_value(std::vector<std::string>& diffs, const char* what, std::optional<int> expected,
                std::optional<int> got) {
  if (!expected.has_value()) return;
  if (!got.has_value()) {
    diffs.push_back(std::string(what) + ": expected " + std::to_string(*expected) +
                    ", classifier yields none");
  } else if (*expected != *got) {
    diffs.push_back(std::string(what) + ": expected " + std::to_string(*expected) + ", got " +
                    std::to_string(*got));
  }
}

}  // namespace

DiffReport reproduce_tables(const std::vector<TableRow>& rows) {
  DiffReport report;
  for (const auto& row : rows) {
    report.rows_checked += 1;
    std::vector<std::string> diffs;
    try {
      const ClassifierResult result = classify(row.record);
      if (result.ambiguous) {
        diffs.push_back("classification ambiguous despite full measurement data");
      } else {
        const CandidateTuple& t = result.unique();
        diff_value(diffs, "m", row.expected_m, t.m);
        diff_value(diffs, "n", row.expected_n, t.n);
        diff_value(diffs, "e", row.expected_e, t.e);
        diff_value(diffs, "k", row.expected_k, t.k);
        if (row.record.clF1.has_value()) {
          const i64 observed = AbelianGroup::parse(*row.record.clF1).order();
          if (observed != t.predicted_clF1_order)
            diffs.push_back("clF1 order: observed " + std::to_string(observed) +
                            ", predicted " + std::to_string(t.predicted_clF1_order));
        }
        for (const auto& flag : consistency_check(row.record, result))
          diffs.push_back("consistency: " + flag);
      }
    } catch (const ClassifyError& e) {
      diffs.push_back(std::string("classification failed: ") + e.what());
    }
    if (!diffs.empty())
      report.diffs.push_back({row.table_id, row.record.name.value_or("<unnamed>"), diffs});

    if (row.frequency.has_value()) {
      auto it = std::find_if(report.frequency_totals.begin(), report.frequency_totals.end(),
                             [&](const auto& pair) { return pair.first == row.table_id; });
      if (it == report.frequency_totals.end())
        report.frequency_totals.emplace_back(row.table_id, *row.frequency);
      else
        it->second = checked_add(it->second, *row.frequency);
    }
  }
  return report;
}

DiffReport reproduce_tables(const std::vector<std::string>& table_ids) {
  std::vector<TableRow> rows;
  for (const auto& id : table_ids) {
    const std::vector<TableRow> part = bundled_rows(id);
    if (part.empty()) throw SchemaError("unknown table id '" + id + "'");
    rows.insert(rows.end(), part.begin(), part.end());
  }
  DiffReport report = reproduce_tables(rows);
  // Whole tables are selected here, so the frequency checksum applies.
  for (const auto& id : table_ids) {
    const std::optional<i64> expected = expected_frequency_total(id);
    if (!expected.has_value()) continue;
    i64 computed = 0;
    for (const auto& [table, total] : report.frequency_totals)
      if (table == id) computed = total;
    if (computed != *expected)
      report.diffs.push_back(
          {id, "<frequency total>",
           {"frequency total: computed " + std::to_string(computed) + ", expected " +
            std::to_string(*expected)}});
  }
  return report;
}

}  // namespace ppg
