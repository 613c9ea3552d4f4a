#include "gcfl/spec_file.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace gcfl {

namespace {

class DocumentParser {
 public:
  explicit DocumentParser(std::string_view text) : text_(text) {}

  SpecDocument parse() {
    SpecDocument doc;
    std::string section = "surface";
    for (;;) {
      skip_blank();
      if (at_end()) break;
      if (peek() == '[') {
        advance();
        skip_inline_space();
        section = word();
        if (section.empty()) fail("expected section name");
        skip_inline_space();
        if (peek() != ']') fail("expected ']'");
        advance();
        continue;
      }
      const int key_line = line_, key_col = col_;
      std::string key = word();
      if (key.empty()) fail("expected key");
      skip_inline_space();
      if (peek() != '=') fail("expected '=' after key '" + key + "'");
      advance();
      skip_inline_space();
      SpecValue value = parse_value();
      if (doc.has(section, key))
        throw ParseError("duplicate key '" + key + "' in [" + section + "]", key_line, key_col);
      doc.set(section, key, std::move(value));
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // Whitespace, newlines and comments.
  void skip_blank() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) advance();
  }

  std::string word() {
    std::string w;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
        w += c;
        advance();
      } else {
        break;
      }
    }
    return w;
  }

  double parse_number_token() {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-')
        advance();
      else
        break;
    }
    const std::string tok(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) fail("malformed number '" + tok + "'");
    return v;
  }

  SpecValue parse_value() {
    SpecValue v;
    v.line = line_;
    v.column = col_;
    const char c = peek();
    if (c == '"') {
      advance();
      v.line = line_;
      v.column = col_;
      std::string s;
      for (;;) {
        if (at_end() || peek() == '\n') fail("unterminated string");
        const char ch = peek();
        advance();
        if (ch == '"') break;
        if (ch == '\\') {
          if (at_end()) fail("unterminated string");
          s += peek();
          advance();
        } else {
          s += ch;
        }
      }
      v.data = std::move(s);
    } else if (c == '[') {
      advance();
      std::vector<double> items;
      skip_blank();
      if (peek() == ']') {
        advance();
      } else {
        for (;;) {
          skip_blank();
          items.push_back(parse_number_token());
          skip_blank();
          if (peek() == ',') {
            advance();
          } else if (peek() == ']') {
            advance();
            break;
          } else {
            fail("expected ',' or ']' in list");
          }
        }
      }
      v.data = std::move(items);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      v.data = parse_number_token();
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      v.data = word();
    } else {
      fail("expected a value");
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

bool SpecDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const SpecValue* SpecDocument::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

double SpecDocument::number(const std::string& section, const std::string& key) const {
  const SpecValue* v = find(section, key);
  if (!v) throw ValidationError("missing key '" + key + "' in [" + section + "]");
  if (!v->is_number())
    throw ParseError("key '" + key + "' must be a number", v->line, v->column);
  return std::get<double>(v->data);
}

double SpecDocument::number_or(const std::string& section, const std::string& key,
                               double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::string SpecDocument::string(const std::string& section, const std::string& key) const {
  const SpecValue* v = find(section, key);
  if (!v) throw ValidationError("missing key '" + key + "' in [" + section + "]");
  if (!v->is_string())
    throw ParseError("key '" + key + "' must be a string", v->line, v->column);
  return std::get<std::string>(v->data);
}

std::vector<double> SpecDocument::list(const std::string& section, const std::string& key) const {
  const SpecValue* v = find(section, key);
  if (!v) throw ValidationError("missing key '" + key + "' in [" + section + "]");
  if (!v->is_list()) throw ParseError("key '" + key + "' must be a list", v->line, v->column);
  return std::get<std::vector<double>>(v->data);
}

void SpecDocument::set(const std::string& section, const std::string& key, SpecValue value) {
  sections_[section][key] = std::move(value);
}

SpecDocument parse_document(std::string_view text) { return DocumentParser(text).parse(); }

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string to_text(const SpecDocument& doc) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, section] : doc.sections()) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const auto& [key, value] : section) {
      out << key << " = ";
      if (value.is_number()) {
        out << format_number(std::get<double>(value.data));
      } else if (value.is_string()) {
        out << quote(std::get<std::string>(value.data));
      } else {
        const auto& items = std::get<std::vector<double>>(value.data);
        out << '[';
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (i) out << ", ";
          out << format_number(items[i]);
        }
        out << ']';
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace gcfl
