#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rmt::csv {

/// RFC 4180 record reader. Quoted fields may contain commas, doubled
/// quotes and embedded line breaks.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. `line` receives the 1-based
  /// physical line the record started on.
  std::optional<std::vector<std::string>> next(std::size_t& line);

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace rmt::csv
