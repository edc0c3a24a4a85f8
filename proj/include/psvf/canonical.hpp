#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psvf/field.hpp"
#include "psvf/flow.hpp"

namespace psvf {

enum class FamilyKind { FiniteK, Infinite, Bean };

struct FamilySpec {
  FamilyKind kind = FamilyKind::FiniteK;
  int k = 2;

  std::string label() const;
  bool operator==(const FamilySpec&) const = default;
};

/// Accepts "k2", "k3", ..., "inf" and "bean".
FamilySpec parse_family(const std::string& text);

/// P_k, P_k' or P_k'' at x, evaluated from the factored product.
double poly_Pk(int k, double x, int order = 0);

/// Exact rational with int64 parts, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Coefficients of P_k in ascending powers, expanded exactly.
std::vector<Rational> poly_Pk_coefficients(int k);

/// Coefficients of P_k' in ascending powers.
std::vector<Rational> poly_derivative(const std::vector<Rational>& c);

struct FoldLattice {
  std::optional<double> r0;
  std::optional<double> r1;
  std::vector<double> folds;
};

/// Finite k: r0 = (1-k)/2, r1 = (k-1)/2, p_j = j - k/2.  Infinite: the
/// integers in [-window, window].
FoldLattice fold_lattice(const FamilySpec& spec, int window = 64);

/// Piece of an invariant curve over an x-interval.
struct CompartmentPiece {
  Side side = Side::Upper;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;
};

/// I_n: the arc of the invariant set an orbit occupies between two
/// consecutive fold hits.  Folds are addressed by id: 0..k-2 for finite k
/// (p_{id+1}), the integer itself for the infinite family.
struct Compartment {
  long long index = 0;
  std::vector<CompartmentPiece> pieces;
  long long start_fold = 0;
  long long end_fold = 0;
  Mode first_leg = Mode::Upper;
};

struct InvariantSet {
  /// Upper and lower boundary curves.
  std::function<double(double)> upper;
  std::function<double(double)> lower;
  double x_min = 0.0;
  double x_max = 0.0;
  bool unbounded = false;
  /// Bounding box of the set (the infinite family uses its window).
  double y_min = 0.0;
  double y_max = 0.0;
};

/// The bean section K = {0} x (0, 1].
struct Section {
  double tol = 1e-12;
  bool contains(Vec2 p) const { return std::abs(p.x) <= tol && p.y > 0.0 && p.y <= 1.0 + tol; }
};

class CanonicalFamily {
 public:
  static CanonicalFamily make(const FamilySpec& spec, int window = 64);

  const FamilySpec& spec() const { return spec_; }
  const PiecewiseField& field() const { return field_; }
  const InvariantSet& invariant_set() const { return set_; }
  const FoldLattice& lattice() const { return lattice_; }
  int window() const { return window_; }
  bool symbolic() const { return spec_.kind != FamilyKind::Bean; }

  /// Number of symbols (2(k-1)); 0 for the integer alphabet.
  int alphabet_size() const;

  /// Fold ids within the family (window-limited for the infinite family).
  long long min_fold() const;
  long long max_fold() const;
  double fold_x(long long id) const;
  /// Fold id whose abscissa is within `tol` of x.
  std::optional<long long> fold_at(double x, double tol = 1e-9) const;

  /// Compartment that starts at `fold` with the given first leg.
  long long compartment_from(long long fold, Mode leg) const;
  Compartment compartment(long long index) const;
  /// All compartments (window-limited for the infinite family).
  std::vector<Compartment> compartments() const;
  /// Compartments that may follow `index`.
  std::vector<long long> successors(long long index) const;
  bool admissible(long long from, long long to) const;
  bool valid_symbol(long long index) const;

  /// Compartment of a point of the invariant set on the curve of `side`;
  /// nullopt at a fold.  Throws OffInvariantSet for points off the set.
  std::optional<long long> compartment_of(Vec2 p, Side side, double tol = 1e-9) const;
  /// Same with the curve side taken from the sign of y.
  std::optional<long long> compartment_of(Vec2 p, double tol = 1e-9) const;

  /// Point in the middle of a compartment's first piece, with its side.
  std::pair<Vec2, Side> interior_point(long long index) const;

  /// Diagonal of the invariant set's bounding box.
  double diameter() const;

  const Section& section() const { return section_; }

 private:
  FamilySpec spec_;
  PiecewiseField field_;
  InvariantSet set_;
  FoldLattice lattice_;
  Section section_;
  int window_ = 64;

  CanonicalFamily(FamilySpec spec, PiecewiseField field, int window);
};

/// The invariant curve y = P(x) of the family (P_k or the periodic profile).
double family_profile(const FamilySpec& spec, double x, int order = 0);

}  // namespace psvf
