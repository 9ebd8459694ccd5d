#ifndef TGFL_SEIFERT_HPP
#define TGFL_SEIFERT_HPP

#include <string>
#include <vector>

#include "tgfl/expr.hpp"

namespace tgfl {

using Int = long long;

/// Integer matrix with exact (overflow-checked) arithmetic.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Int> data;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0) {}
  Int& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  Int at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  static IntMatrix identity(int n);
  IntMatrix times(const IntMatrix& other) const;
  Int determinant() const;  // Bareiss, exact
};

struct SmithDecomposition {
  IntMatrix U;  // rows x rows, unimodular
  IntMatrix D;  // diagonal with divisibility chain
  IntMatrix V;  // cols x cols, unimodular
};

/// D = U * M * V with d1 | d2 | ... and nonnegative diagonal.
SmithDecomposition smith_normal_form(const IntMatrix& M);

struct SeifertData {
  Int genus = 0;
  bool base_orientable = true;
  Int euler_integer = 0;  // integer part b of the Euler number
  std::vector<std::pair<Int, Int>> fibers;  // (alpha_j, beta_j), alpha_j >= 2
  bool total_space_orientable = true;

  void validate() const;
};

struct H1Element {
  std::vector<Int> free_part;
  std::vector<Int> torsion_part;  // residues mod the invariant factors

  bool is_zero() const;
};

struct AbelianGroup {
  Int rank = 0;
  std::vector<Int> torsion;  // invariant factors >= 2, divisibility chain

  /// Order of a torsion generator position, 0 meaning infinite.
  Int torsion_factor(size_t i) const { return torsion[i]; }
};

struct H1Result {
  AbelianGroup group;
  H1Element fiber_class;                // gamma_0, the regular fiber
  std::vector<H1Element> singular_classes;  // g_j for each exceptional fiber
};

// --- operations ---

/// |eul| <= max(0, 2g - 2): existence of a foliation transverse to the
/// fibers of the circle bundle.
bool milnor_wood(Int genus, Int euler);

enum class LightlikeVerdict {
  Impossible,    // g = 0
  PossibleG1,    // g = 1: locally free R^2 action
  Excluded,      // g > 1 and |eul| != 2g - 2
  ExistsAffine,  // g > 1 and eul = 2 - 2g: unit tangent bundle side
  UnknownSign,   // g > 1 and eul = 2g - 2: necessary condition holds, open
};

LightlikeVerdict lightlike_obstruction(Int genus, Int euler);

/// Abelianization of the Seifert presentation, reduced by Smith normal form.
H1Result h1_of_seifert(const SeifertData& s);

struct EulerClassDual {
  H1Element element;  // (chi - r) gamma_0 + sum g_j
  bool is_zero = false;
};

EulerClassDual euler_class_dual(const SeifertData& s);

enum class ExistenceVerdict { Exists, ExcludedVerdict, Open };

struct ClassificationRow {
  Int genus = 0;
  Int euler = 0;
  ExistenceVerdict nondegenerate = ExistenceVerdict::Open;
  ExistenceVerdict lightlike = ExistenceVerdict::Open;
  ExistenceVerdict mixed = ExistenceVerdict::Exists;
  LightlikeVerdict lightlike_detail = LightlikeVerdict::Impossible;
  std::string note;
};

/// Aggregated verdicts per causal class for a circle bundle over an
/// orientable surface.
ClassificationRow classify_tg_foliations(Int genus, Int euler);

const char* to_string(LightlikeVerdict v);
const char* to_string(ExistenceVerdict v);

}  // namespace tgfl

#endif  // TGFL_SEIFERT_HPP
