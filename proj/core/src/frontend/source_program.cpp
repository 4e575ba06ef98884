#include "slicebench/frontend/source_program.hpp"

#include <stdexcept>

namespace slicebench::frontend {

SourceProgram::SourceProgram(std::string id, std::string text)
    : id_(std::move(id)), text_(std::move(text)) {
  std::size_t start = 0;
  const std::size_t n = text_.size();
  while (start < n) {
    std::size_t pos = start;
    while (pos < n && text_[pos] != '\n' && text_[pos] != '\r') ++pos;
    lines_.emplace_back(text_.substr(start, pos - start));
    if (pos == n) {
      terminators_.emplace_back();
      start = n;
      break;
    }
    if (text_[pos] == '\r' && pos + 1 < n && text_[pos + 1] == '\n') {
      terminators_.emplace_back("\r\n");
      start = pos + 2;
    } else {
      terminators_.emplace_back(1, text_[pos]);
      start = pos + 1;
    }
  }
}

std::string_view SourceProgram::line(int number) const {
  if (number < 1 || number > line_count()) {
    throw std::out_of_range("line " + std::to_string(number) + " outside [1, " +
                            std::to_string(line_count()) + "]");
  }
  return lines_[static_cast<std::size_t>(number - 1)];
}

std::string SourceProgram::join() const {
  std::string out;
  out.reserve(text_.size());
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    out += lines_[i];
    out += terminators_[i];
  }
  return out;
}

}  // namespace slicebench::frontend
