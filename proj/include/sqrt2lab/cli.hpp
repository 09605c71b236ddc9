#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sqrt2lab::cli {

enum class CellKind { Integer, Decimal, Text };

struct Column {
  std::string name;
  CellKind kind = CellKind::Text;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;
};

enum class OutputFormat { Text, Csv, Json };

/// Text: aligned columns under a header. CSV: header row, RFC 4180 quoting,
/// LF endings. JSON: array of objects; integers longer than 15 digits are
/// emitted as strings. Empty tables keep their header (CSV/text) or give [].
std::string export_table(const Table& table, OutputFormat format);

/// Command output: the table, plus an optional free-form rendering used by
/// the text format instead of the aligned table.
struct CommandOutput {
  Table table;
  std::optional<std::string> text;
};

/// Parses args (without the program name) and runs one command.
/// Returns 0 on success, 1 on domain errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqrt2lab::cli
