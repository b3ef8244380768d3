#include "cointvar/error.hpp"

namespace cointvar {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kInsufficientHistory: return "insufficient-history";
    case ErrorKind::kInsufficientRange: return "insufficient-range";
    case ErrorKind::kSingularDesign: return "singular-design";
    case ErrorKind::kSingularMoment: return "singular-moment";
    case ErrorKind::kInvalidRank: return "invalid-rank";
    case ErrorKind::kInvalidSpec: return "invalid-spec";
    case ErrorKind::kDegenerateVariance: return "degenerate-variance";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kNoOverlap: return "no-overlap";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace cointvar
