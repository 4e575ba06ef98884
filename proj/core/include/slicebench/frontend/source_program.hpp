#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace slicebench::frontend {

/// Raw program text plus a 1-based view of its physical lines.
///
/// `lines` keeps the terminator-free text of each line; `line_ending`
/// remembers what separated them so that `join()` reproduces `text`
/// byte-for-byte (including a trailing newline, or its absence).
class SourceProgram {
 public:
  SourceProgram() = default;
  SourceProgram(std::string id, std::string text);

  const std::string& id() const noexcept { return id_; }
  const std::string& text() const noexcept { return text_; }

  /// Number of physical lines. A trailing newline does not open a new line.
  int line_count() const noexcept { return static_cast<int>(lines_.size()); }

  /// 1-based line access; throws std::out_of_range outside [1, line_count].
  std::string_view line(int number) const;

  const std::vector<std::string>& lines() const noexcept { return lines_; }

  /// Rebuilds the source from its lines and recorded terminators.
  std::string join() const;

 private:
  std::string id_;
  std::string text_;
  std::vector<std::string> lines_;
  std::vector<std::string> terminators_;
};

}  // namespace slicebench::frontend
