#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "reslat/core.hpp"

namespace reslat::cli {

enum class ColumnKind { real, integer, text, complex, boolean };

struct Column {
  std::string name;
  ColumnKind kind;
};

using Cell = std::variant<std::monostate, double, long long, std::string, Complex, bool>;

struct Table {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
};

nlohmann::ordered_json complex_json(Complex z);
nlohmann::ordered_json to_json(const Table& t);
void write_json(const Table& t, std::ostream& os);
// Complex columns become name_re, name_im; empty cells stay empty.
void write_csv(const Table& t, std::ostream& os);
std::string format_double(double v);

}  // namespace reslat::cli
