#pragma once

// Key/value spec documents.
//
//   # comment
//   [surface]
//   kind = "torus"
//   a = 3  b = 1            # several pairs may share a line
//   domain = [0.15, 1.40]
//
// Values are numbers, quoted strings, bare words or numeric lists. Pairs that
// appear before any section header belong to [surface].

#include "gcfl/errors.hpp"

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gcfl {

struct SpecValue {
  std::variant<double, std::string, std::vector<double>> data;
  int line = 0;
  int column = 0;  // first character of the value (inside the quotes for strings)

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_list() const { return std::holds_alternative<std::vector<double>>(data); }
};

class SpecDocument {
 public:
  using Section = std::map<std::string, SpecValue>;

  bool has(const std::string& section, const std::string& key) const;
  const SpecValue* find(const std::string& section, const std::string& key) const;

  // Typed accessors raise ValidationError naming the offending key.
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string string(const std::string& section, const std::string& key) const;
  std::vector<double> list(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, SpecValue value);

  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  std::map<std::string, Section> sections_;
};

SpecDocument parse_document(std::string_view text);
std::string to_text(const SpecDocument& doc);

// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

}  // namespace gcfl
