#include "icprobe/error.hpp"

#include <utility>

namespace icprobe {

namespace {

std::string Locate(const std::string& file, std::size_t line,
                   const std::string& field, const std::string& message) {
  std::string out = file;
  if (line > 0) out += ":" + std::to_string(line);
  if (!field.empty()) out += (out.empty() ? "" : ": ") + std::string("field '") + field + "'";
  if (!out.empty()) out += ": ";
  return out + message;
}

}  // namespace

ValidationError::ValidationError(const std::string& message)
    : Error(ErrorKind::kValidation, message) {}

ValidationError::ValidationError(std::string file, std::size_t line,
                                 std::string field, const std::string& message)
    : Error(ErrorKind::kValidation, Locate(file, line, field, message)),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

}  // namespace icprobe
