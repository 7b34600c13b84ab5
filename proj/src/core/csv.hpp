#pragma once

// RFC-4180 style CSV with '\n' line endings. Floats are written with 17
// significant digits in a compact scientific form (1.0000000000000000e0).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace adiabench::csv {

enum class ColumnType { real, integer, text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::real;
};

using Schema = std::vector<Column>;
using Cell = std::variant<double, std::int64_t, std::string>;
using Row = std::vector<Cell>;

std::string format_real(double v);
std::string quote(const std::string& field);

// Throws Errc::schema on arity/type mismatch or a non-finite real.
std::string format_row(const Schema& schema, const Row& row);
std::string format_header(const Schema& schema);

// Whole-table emission; an empty `rows` gives a header-only file.
void emit_csv(const std::vector<Row>& rows, const Schema& schema, const std::filesystem::path& path);

// Streaming writer for outputs too large to hold as rows.
class Writer {
 public:
  Writer(const std::filesystem::path& path, Schema schema);
  void write(const Row& row);
  void close();

 private:
  std::filesystem::path path_;
  Schema schema_;
  std::ofstream out_;
};

}  // namespace adiabench::csv
