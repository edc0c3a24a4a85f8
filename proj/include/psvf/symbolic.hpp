#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psvf {

class CanonicalFamily;

struct Alphabet {
  enum Kind { Finite, Integers } kind = Finite;
  int size = 2;  // Finite only

  static Alphabet finite(int k) { return {Finite, k}; }
  static Alphabet integers() { return {Integers, 0}; }
  std::string str() const;
  bool operator==(const Alphabet&) const = default;
};

/// Finite window of a bi-infinite sequence: symbols[i] is the entry at index
/// offset + i.
struct SymbolWindow {
  Alphabet alphabet;
  long long offset = 0;
  std::vector<long long> symbols;

  long long first() const { return offset; }
  long long last() const { return offset + static_cast<long long>(symbols.size()) - 1; }
  bool contains(long long j) const { return j >= first() && j <= last(); }
  long long at(long long j) const;
  /// Throws InvalidArgument when an entry is outside a finite alphabet.
  void validate() const;
  std::string str() const;
  bool operator==(const SymbolWindow&) const = default;
};

/// Parses "0110" (one digit per symbol) or comma separated integers.
SymbolWindow parse_window(const std::string& text, Alphabet alphabet, long long offset = 0);

/// b_j = a_{j+steps}.
SymbolWindow shift(const SymbolWindow& w, long long steps);

/// Restriction to the indices [lo, hi] (clipped to the window).
SymbolWindow restrict_window(const SymbolWindow& w, long long lo, long long hi);

/// The true distance lies in [value, value + tail].
struct MetricBound {
  double value = 0.0;
  double tail = 0.0;
  double upper() const { return value + tail; }
};

/// sum_j |x_j - y_j| / 2^|j| over the common window plus a tail bound for the
/// unobserved indices.  Integer windows must be admissible for Theta_inf.
MetricBound metric_d(const SymbolWindow& a, const SymbolWindow& b);

/// |x_{j+1} - x_j| <= 2 on the window (necessary, not sufficient, for the
/// full sequence).
bool theta_inf_admissible(const SymbolWindow& w);

struct TransitionMatrix {
  int size = 0;
  std::vector<std::vector<std::uint8_t>> entries;

  static TransitionMatrix zeros(int m);
  static TransitionMatrix from_rows(const std::vector<std::vector<int>>& rows);
  bool operator==(const TransitionMatrix&) const = default;
  std::uint8_t operator()(int i, int j) const { return entries[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  std::string json() const;
  /// Every consecutive pair of the window is allowed.
  bool admits(const SymbolWindow& w) const;
};

/// Adjacency of the compartments obtained by simulating the flow from the
/// interior of each compartment through the next fold.
TransitionMatrix sft_matrix(const CanonicalFamily& family);

struct MixingResult {
  bool mixing = false;
  int n0 = 0;
};

/// Smallest n0 <= (m-1)^2 + 1 with M^n0 > 0 entrywise.
MixingResult is_mixing(const TransitionMatrix& m);

/// trace(M^n): the number of points of period n of the subshift.
std::uint64_t periodic_count(const TransitionMatrix& m, int n);

}  // namespace psvf
