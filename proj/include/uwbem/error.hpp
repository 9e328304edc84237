#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uwbem {

// Coarse failure class, surfaced by the CLI as a machine-parsable tag.
enum class ErrorCategory {
  kConfig,
  kShape,
  kDomain,
  kParse,
  kIo,
};

std::string_view category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) { throw Error(c, what); }

inline void require(bool ok, ErrorCategory c, const std::string& what) {
  if (!ok) fail(c, what);
}

}  // namespace uwbem
