#include "table.hpp"

#include <cmath>
#include <cstdio>

namespace reslat::cli {

using nlohmann::ordered_json;

ordered_json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

namespace {

ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, Complex>) return complex_json(v);
        else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
        else return v;
      },
      c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json to_json(const Table& t) {
  ordered_json j;
  j["command"] = t.command;
  j["params"] = t.params;
  ordered_json cols = ordered_json::array();
  for (const auto& c : t.columns) cols.push_back(c.name);
  j["columns"] = cols;
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json o = ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i].name] = cell_json(r[i]);
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

void write_json(const Table& t, std::ostream& os) { os << to_json(t).dump(2) << '\n'; }

void write_csv(const Table& t, std::ostream& os) {
  std::string header;
  for (const auto& c : t.columns) {
    if (!header.empty()) header += ',';
    header += c.kind == ColumnKind::complex ? c.name + "_re," + c.name + "_im" : c.name;
  }
  os << header << '\n';
  for (const auto& r : t.rows) {
    std::string line;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) line += ',';
      const Cell& c = r[i];
      if (t.columns[i].kind == ColumnKind::complex) {
        if (const auto* z = std::get_if<Complex>(&c)) line += format_double(z->real()) + "," + format_double(z->imag());
        else line += ",";
        continue;
      }
      line += std::visit(
          [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return csv_escape(v);
            else return "";
          },
          c);
    }
    os << line << '\n';
  }
}

}  // namespace reslat::cli
