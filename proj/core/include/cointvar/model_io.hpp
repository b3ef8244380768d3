#pragma once

#include "cointvar/var.hpp"
#include "cointvar/vecm.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace cointvar {

/**
 * Structured-text model files. Layout (one item per line, tokens separated
 * by single spaces, numbers rendered with %.17g):
 *
 *   cointvar-model 1
 *   kind var|vecm
 *   d <d>
 *   p <p>
 *   rank <r>                  (vecm only)
 *   det none|constant
 *   matrix phi_<k> <d> <d>    k = 1..p, VAR representation, both kinds
 *   <row>...
 *   matrix psi <d> <m>
 *   matrix resid_cov <d> <d>
 *   matrix alpha <d> <r>      (vecm only; the next four items too)
 *   matrix beta <d> <r>
 *   matrix gamma_<k> <d> <d>  k = 1..p-1
 *   vector eigenvalues <n>    (n = 0 when unavailable)
 *   end
 *
 * A matrix with zero columns has no row lines.
 */
struct ModelFile {
  enum class Kind { kVar, kVecm };
  Kind kind = Kind::kVar;
  VarModel var;
  std::optional<VecmModel> vecm;
};

void write_model(std::ostream& out, const VarModel& model);
void write_model(std::ostream& out, const VecmModel& model);
void write_model(const std::filesystem::path& path, const ModelFile& model);

// Throws ParseError on malformed input.
ModelFile read_model(std::istream& in);
ModelFile read_model(const std::filesystem::path& path);

}  // namespace cointvar
