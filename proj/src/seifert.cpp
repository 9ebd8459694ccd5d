#include "tgfl/seifert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tgfl {

namespace {

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r))
    fail(ErrorKind::EvaluationError, "integer overflow in exact arithmetic");
  return r;
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r))
    fail(ErrorKind::EvaluationError, "integer overflow in exact arithmetic");
  return r;
}

}  // namespace

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::times(const IntMatrix& other) const {
  if (cols != other.rows) fail(ErrorKind::InvalidParameter, "matrix shape mismatch");
  IntMatrix r(rows, other.cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < other.cols; ++j) {
      Int s = 0;
      for (int k = 0; k < cols; ++k) s = checked_add(s, checked_mul(at(i, k), other.at(k, j)));
      r.at(i, j) = s;
    }
  return r;
}

Int IntMatrix::determinant() const {
  if (rows != cols) fail(ErrorKind::InvalidParameter, "determinant of non-square matrix");
  int n = rows;
  // Bareiss fraction-free elimination.
  std::vector<__int128> m(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<size_t>(i) * n + j] = at(i, j);
  __int128 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[static_cast<size_t>(k) * n + k] == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[static_cast<size_t>(i) * n + k] != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      for (int j = 0; j < n; ++j)
        std::swap(m[static_cast<size_t>(k) * n + j], m[static_cast<size_t>(swap) * n + j]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        __int128 v = m[static_cast<size_t>(i) * n + j] * m[static_cast<size_t>(k) * n + k] -
                     m[static_cast<size_t>(i) * n + k] * m[static_cast<size_t>(k) * n + j];
        m[static_cast<size_t>(i) * n + j] = v / prev;
      }
    prev = m[static_cast<size_t>(k) * n + k];
  }
  __int128 det = m[static_cast<size_t>(n - 1) * n + (n - 1)] * sign;
  if (det > static_cast<__int128>(9e18) || det < -static_cast<__int128>(9e18))
    fail(ErrorKind::EvaluationError, "determinant overflow");
  return static_cast<Int>(det);
}

SmithDecomposition smith_normal_form(const IntMatrix& M) {
  SmithDecomposition out;
  out.D = M;
  out.U = IntMatrix::identity(M.rows);
  out.V = IntMatrix::identity(M.cols);
  IntMatrix& D = out.D;
  IntMatrix& U = out.U;
  IntMatrix& V = out.V;

  auto row_add = [&](int dst, int src, Int factor) {  // row dst += factor * row src
    for (int j = 0; j < D.cols; ++j)
      D.at(dst, j) = checked_add(D.at(dst, j), checked_mul(factor, D.at(src, j)));
    for (int j = 0; j < U.cols; ++j)
      U.at(dst, j) = checked_add(U.at(dst, j), checked_mul(factor, U.at(src, j)));
  };
  auto col_add = [&](int dst, int src, Int factor) {
    for (int i = 0; i < D.rows; ++i)
      D.at(i, dst) = checked_add(D.at(i, dst), checked_mul(factor, D.at(i, src)));
    for (int i = 0; i < V.rows; ++i)
      V.at(i, dst) = checked_add(V.at(i, dst), checked_mul(factor, V.at(i, src)));
  };
  auto row_swap = [&](int a, int b) {
    for (int j = 0; j < D.cols; ++j) std::swap(D.at(a, j), D.at(b, j));
    for (int j = 0; j < U.cols; ++j) std::swap(U.at(a, j), U.at(b, j));
  };
  auto col_swap = [&](int a, int b) {
    for (int i = 0; i < D.rows; ++i) std::swap(D.at(i, a), D.at(i, b));
    for (int i = 0; i < V.rows; ++i) std::swap(V.at(i, a), V.at(i, b));
  };
  auto row_negate = [&](int a) {
    for (int j = 0; j < D.cols; ++j) D.at(a, j) = -D.at(a, j);
    for (int j = 0; j < U.cols; ++j) U.at(a, j) = -U.at(a, j);
  };

  int n = std::min(D.rows, D.cols);
  for (int t = 0; t < n; ++t) {
    // Find pivot: smallest nonzero |entry| in the remaining block.
    int pi = -1, pj = -1;
    Int best = 0;
    for (int i = t; i < D.rows; ++i)
      for (int j = t; j < D.cols; ++j) {
        Int v = std::abs(D.at(i, j));
        if (v != 0 && (pi < 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // block is zero
    if (pi != t) row_swap(pi, t);
    if (pj != t) col_swap(pj, t);

    bool again = true;
    while (again) {
      again = false;
      for (int i = t + 1; i < D.rows; ++i) {
        if (D.at(i, t) == 0) continue;
        Int q = D.at(i, t) / D.at(t, t);
        row_add(i, t, -q);
        if (D.at(i, t) != 0) {
          row_swap(i, t);
          again = true;
        }
      }
      for (int j = t + 1; j < D.cols; ++j) {
        if (D.at(t, j) == 0) continue;
        Int q = D.at(t, j) / D.at(t, t);
        col_add(j, t, -q);
        if (D.at(t, j) != 0) {
          col_swap(j, t);
          again = true;
        }
      }
      if (!again) {
        // Divisibility fix-up: pivot must divide every remaining entry.
        for (int i = t + 1; i < D.rows && !again; ++i)
          for (int j = t + 1; j < D.cols && !again; ++j)
            if (D.at(i, j) % D.at(t, t) != 0) {
              row_add(t, i, 1);
              again = true;
            }
      }
    }
    if (D.at(t, t) < 0) row_negate(t);
  }
  return out;
}

void SeifertData::validate() const {
  if (genus < 0) fail(ErrorKind::InvalidParameter, "genus must be nonnegative");
  if (!base_orientable) fail(ErrorKind::NotOrientableBase, "base must be orientable");
  for (const auto& [alpha, beta] : fibers) {
    if (alpha < 2) fail(ErrorKind::InvalidParameter, "exceptional fiber needs alpha >= 2");
    if (std::gcd(alpha, beta) != 1)
      fail(ErrorKind::InvalidParameter, "fiber pair must be coprime");
  }
}

bool H1Element::is_zero() const {
  for (Int v : free_part)
    if (v != 0) return false;
  for (Int v : torsion_part)
    if (v != 0) return false;
  return true;
}

bool milnor_wood(Int genus, Int euler) {
  if (genus < 0) fail(ErrorKind::InvalidParameter, "genus must be nonnegative");
  Int chi = 2 - 2 * genus;
  Int bound = std::max<Int>(0, -chi);
  return std::abs(euler) <= bound;
}

LightlikeVerdict lightlike_obstruction(Int genus, Int euler) {
  if (genus < 0) fail(ErrorKind::InvalidParameter, "genus must be nonnegative");
  if (genus == 0) return LightlikeVerdict::Impossible;
  if (genus == 1) return LightlikeVerdict::PossibleG1;
  Int target = 2 * genus - 2;
  if (std::abs(euler) != target) return LightlikeVerdict::Excluded;
  return euler == -target ? LightlikeVerdict::ExistsAffine : LightlikeVerdict::UnknownSign;
}

H1Result h1_of_seifert(const SeifertData& s) {
  s.validate();
  int r = static_cast<int>(s.fibers.size());
  // Generators: q_1 .. q_r, h. Relations: alpha_j q_j + beta_j h = 0 and
  // sum_j q_j + b h = 0. Surface generators contribute a free Z^{2g}.
  int gens = r + 1;
  int rels = r + 1;
  IntMatrix A(gens, rels);  // columns are relation vectors: A : Z^rels -> Z^gens
  for (int j = 0; j < r; ++j) {
    A.at(j, j) = s.fibers[static_cast<size_t>(j)].first;   // alpha_j q_j
    A.at(r, j) = s.fibers[static_cast<size_t>(j)].second;  // beta_j h
  }
  for (int j = 0; j < r; ++j) A.at(j, r) = 1;  // sum q_j
  A.at(r, r) = s.euler_integer;                // + b h

  SmithDecomposition snf = smith_normal_form(A);
  int n = std::min(A.rows, A.cols);
  std::vector<Int> diag;
  for (int i = 0; i < n; ++i) diag.push_back(snf.D.at(i, i));

  H1Result result;
  std::vector<int> torsion_rows, free_rows;
  for (int i = 0; i < gens; ++i) {
    Int d = i < n ? diag[static_cast<size_t>(i)] : 0;
    if (d == 0)
      free_rows.push_back(i);
    else if (d > 1)
      torsion_rows.push_back(i);
    // d == 1: killed coordinate
  }
  result.group.rank = static_cast<Int>(free_rows.size()) + 2 * s.genus;
  for (int i : torsion_rows) result.group.torsion.push_back(snf.D.at(i, i));

  auto element_of_generator = [&](int gen_index) {
    // Class of e_gen in coker(A) expressed in the Smith basis y = U x.
    H1Element el;
    for (int i : free_rows) el.free_part.push_back(snf.U.at(i, gen_index));
    for (int i : torsion_rows) {
      Int d = snf.D.at(i, i);
      Int v = snf.U.at(i, gen_index) % d;
      if (v < 0) v += d;
      el.torsion_part.push_back(v);
    }
    // surface generators: zero coordinates
    for (Int k = 0; k < 2 * s.genus; ++k) el.free_part.push_back(0);
    return el;
  };

  result.fiber_class = element_of_generator(r);
  for (int j = 0; j < r; ++j) result.singular_classes.push_back(element_of_generator(j));
  return result;
}

EulerClassDual euler_class_dual(const SeifertData& s) {
  s.validate();
  if (!s.total_space_orientable)
    fail(ErrorKind::NotAdmissible, "total space must be orientable");
  Int r = static_cast<Int>(s.fibers.size());
  if (s.genus == 0 && r < 3)
    fail(ErrorKind::NotAdmissible, "base S^2 needs at least three exceptional fibers");

  H1Result h1 = h1_of_seifert(s);
  Int chi = 2 - 2 * s.genus;
  Int coeff = chi - r;

  EulerClassDual out;
  H1Element acc;
  acc.free_part.assign(h1.fiber_class.free_part.size(), 0);
  acc.torsion_part.assign(h1.fiber_class.torsion_part.size(), 0);
  auto add_scaled = [&](const H1Element& el, Int scale) {
    for (size_t i = 0; i < acc.free_part.size(); ++i)
      acc.free_part[i] = checked_add(acc.free_part[i], checked_mul(scale, el.free_part[i]));
    for (size_t i = 0; i < acc.torsion_part.size(); ++i) {
      Int d = h1.group.torsion[i];
      Int v = (acc.torsion_part[i] + scale % d * el.torsion_part[i]) % d;
      if (v < 0) v += d;
      acc.torsion_part[i] = v;
    }
  };
  add_scaled(h1.fiber_class, coeff);
  for (const H1Element& gj : h1.singular_classes) add_scaled(gj, 1);
  out.element = acc;
  out.is_zero = acc.is_zero();
  return out;
}

ClassificationRow classify_tg_foliations(Int genus, Int euler) {
  ClassificationRow row;
  row.genus = genus;
  row.euler = euler;

  row.nondegenerate =
      milnor_wood(genus, euler) ? ExistenceVerdict::Exists : ExistenceVerdict::ExcludedVerdict;

  row.lightlike_detail = lightlike_obstruction(genus, euler);
  switch (row.lightlike_detail) {
    case LightlikeVerdict::Impossible:
    case LightlikeVerdict::Excluded:
      row.lightlike = ExistenceVerdict::ExcludedVerdict;
      break;
    case LightlikeVerdict::PossibleG1:
    case LightlikeVerdict::ExistsAffine:
      row.lightlike = ExistenceVerdict::Exists;
      break;
    case LightlikeVerdict::UnknownSign:
      row.lightlike = ExistenceVerdict::Open;
      row.note = "necessary condition holds; no example known for this sign";
      break;
  }

  // Every orientable circle bundle carries a mixed example.
  row.mixed = ExistenceVerdict::Exists;
  return row;
}

const char* to_string(LightlikeVerdict v) {
  switch (v) {
    case LightlikeVerdict::Impossible: return "impossible";
    case LightlikeVerdict::PossibleG1: return "possible_g1";
    case LightlikeVerdict::Excluded: return "excluded";
    case LightlikeVerdict::ExistsAffine: return "exists_affine";
    case LightlikeVerdict::UnknownSign: return "unknown_sign";
  }
  return "?";
}

const char* to_string(ExistenceVerdict v) {
  switch (v) {
    case ExistenceVerdict::Exists: return "exists";
    case ExistenceVerdict::ExcludedVerdict: return "excluded";
    case ExistenceVerdict::Open: return "open";
  }
  return "?";
}

}  // namespace tgfl
