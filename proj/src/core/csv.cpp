#include "core/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace adiabench::csv {

std::string format_real(double v) {
  if (!std::isfinite(v)) fail(Errc::schema, "non-finite value cannot be serialized");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  std::string s(buf, res.ptr);
  // to_chars gives e+00 / e-05; keep the sign only when negative and drop
  // leading zeros.
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  bool neg = false;
  if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) {
    neg = exp[0] == '-';
    exp.erase(0, 1);
  }
  const auto nz = exp.find_first_not_of('0');
  exp = nz == std::string::npos ? "0" : exp.substr(nz);
  return mant + "e" + (neg && exp != "0" ? "-" : "") + exp;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string q = "\"";
  for (char c : field) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string format_header(const Schema& schema) {
  std::string line;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) line += ',';
    line += quote(schema[i].name);
  }
  return line + "\n";
}

std::string format_row(const Schema& schema, const Row& row) {
  if (row.size() != schema.size()) {
    std::ostringstream os;
    os << "row has " << row.size() << " cells, schema has " << schema.size() << " columns";
    fail(Errc::schema, os.str());
  }
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    const auto& col = schema[i];
    switch (col.type) {
      case ColumnType::real:
        if (const auto* d = std::get_if<double>(&row[i])) {
          line += format_real(*d);
        } else if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
          line += format_real(static_cast<double>(*n));
        } else {
          fail(Errc::schema, "column '" + col.name + "' expects a number");
        }
        break;
      case ColumnType::integer:
        if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
          line += std::to_string(*n);
        } else {
          fail(Errc::schema, "column '" + col.name + "' expects an integer");
        }
        break;
      case ColumnType::text:
        if (const auto* s = std::get_if<std::string>(&row[i])) {
          line += quote(*s);
        } else {
          fail(Errc::schema, "column '" + col.name + "' expects text");
        }
        break;
    }
  }
  return line + "\n";
}

void emit_csv(const std::vector<Row>& rows, const Schema& schema, const std::filesystem::path& path) {
  // Format everything first so a schema error leaves no partial file.
  std::string text = format_header(schema);
  for (const auto& r : rows) text += format_row(schema, r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) fail(Errc::io, "failed writing '" + path.string() + "'");
}

Writer::Writer(const std::filesystem::path& path, Schema schema)
    : path_(path), schema_(std::move(schema)), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) fail(Errc::io, "cannot open '" + path.string() + "' for writing");
  out_ << format_header(schema_);
}

void Writer::write(const Row& row) { out_ << format_row(schema_, row); }

void Writer::close() {
  out_.close();
  if (!out_) fail(Errc::io, "failed writing '" + path_.string() + "'");
}

}  // namespace adiabench::csv
