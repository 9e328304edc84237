#include "uwbem/error.hpp"

namespace uwbem {

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kShape: return "shape";
    case ErrorCategory::kDomain: return "domain";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

}  // namespace uwbem
