#include "rmtnet/csv.hpp"

#include <istream>
#include <ostream>

namespace rmt::csv {

std::optional<std::vector<std::string>> Reader::next(std::size_t& line) {
  int c = in_.get();
  // skip a bare trailing newline left by the previous record
  if (c == std::istream::traits_type::eof()) return std::nullopt;

  ++line_;
  line = line_;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;

  while (true) {
    if (c == std::istream::traits_type::eof()) {
      fields.push_back(std::move(field));
      return fields;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        const int peek = in_.peek();
        if (peek == '"') {
          field.push_back('"');
          in_.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      // swallow; CRLF handled at '\n'
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return fields;
    } else {
      field.push_back(ch);
    }
    c = in_.get();
  }
}

std::string escape(const std::string& field) {
  bool needs_quotes = false;
  for (char ch : field) {
    if (ch == ',' || ch == '"' || ch == '\n' || ch == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << escape(fields[i]);
  }
  out.put('\n');
}

}  // namespace rmt::csv
