#include "psvf/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "psvf/canonical.hpp"
#include "psvf/errors.hpp"
#include "psvf/trajectory.hpp"

namespace psvf {

std::string Alphabet::str() const { return kind == Finite ? "finite(" + std::to_string(size) + ")" : "integers"; }

long long SymbolWindow::at(long long j) const {
  if (!contains(j)) throw Error(ErrorCode::InvalidArgument, "index " + std::to_string(j) + " outside the window");
  return symbols[static_cast<size_t>(j - offset)];
}

void SymbolWindow::validate() const {
  if (alphabet.kind == Alphabet::Finite) {
    if (alphabet.size < 1) throw Error(ErrorCode::InvalidArgument, "finite alphabet needs at least one symbol");
    for (long long s : symbols) {
      if (s < 0 || s >= alphabet.size) {
        throw Error(ErrorCode::InvalidArgument,
                    "symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(alphabet.size));
      }
    }
  }
}

std::string SymbolWindow::str() const {
  std::string out;
  const bool digits = alphabet.kind == Alphabet::Finite && alphabet.size <= 10;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (!digits && i > 0) out += ",";
    out += std::to_string(symbols[i]);
  }
  return out;
}

SymbolWindow parse_window(const std::string& text, Alphabet alphabet, long long offset) {
  SymbolWindow w;
  w.alphabet = alphabet;
  w.offset = offset;
  const bool separated = text.find(',') != std::string::npos || text.find('-') != std::string::npos ||
                         alphabet.kind == Alphabet::Integers || alphabet.size > 10;
  if (separated) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) throw Error(ErrorCode::ParseError, "empty entry in symbol list '" + text + "'");
      char* end = nullptr;
      const long long v = std::strtoll(item.c_str(), &end, 10);
      if (*end != '\0') throw Error(ErrorCode::ParseError, "bad symbol '" + item + "'");
      w.symbols.push_back(v);
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw Error(ErrorCode::ParseError, std::string("bad symbol '") + c + "'");
      w.symbols.push_back(c - '0');
    }
  }
  if (w.symbols.empty()) throw Error(ErrorCode::ParseError, "empty symbol word");
  w.validate();
  return w;
}

SymbolWindow shift(const SymbolWindow& w, long long steps) {
  SymbolWindow out = w;
  out.offset = w.offset - steps;
  return out;
}

SymbolWindow restrict_window(const SymbolWindow& w, long long lo, long long hi) {
  SymbolWindow out;
  out.alphabet = w.alphabet;
  lo = std::max(lo, w.first());
  hi = std::min(hi, w.last());
  out.offset = lo;
  for (long long j = lo; j <= hi; ++j) out.symbols.push_back(w.at(j));
  return out;
}

bool theta_inf_admissible(const SymbolWindow& w) {
  for (size_t i = 0; i + 1 < w.symbols.size(); ++i) {
    if (std::llabs(w.symbols[i + 1] - w.symbols[i]) > 2) return false;
  }
  return true;
}

namespace {

double weight(long long j) { return std::ldexp(1.0, -static_cast<int>(std::min<long long>(std::llabs(j), 2000))); }

// sum_{m >= 1} (c + 4m) 2^-|edge + m|: growth bound beyond the right edge.
double linear_tail(double c, long long edge) {
  double sum = 0.0;
  long long m = 1;
  for (; edge + m <= 0; ++m) sum += (c + 4.0 * static_cast<double>(m)) * weight(edge + m);
  const long long s = edge + m;
  const double cs = c + 4.0 * static_cast<double>(m);
  return sum + weight(s) * (2.0 * cs + 8.0);
}

}  // namespace

MetricBound metric_d(const SymbolWindow& a, const SymbolWindow& b) {
  if (!(a.alphabet == b.alphabet)) {
    throw Error(ErrorCode::AlphabetMismatch, "alphabets differ: " + a.alphabet.str() + " vs " + b.alphabet.str());
  }
  a.validate();
  b.validate();
  const bool integers = a.alphabet.kind == Alphabet::Integers;
  if (integers && (!theta_inf_admissible(a) || !theta_inf_admissible(b))) {
    throw Error(ErrorCode::InvalidArgument, "integer windows must satisfy |x_{j+1} - x_j| <= 2");
  }
  const long long lo = std::max(a.first(), b.first());
  const long long hi = std::min(a.last(), b.last());
  MetricBound r;
  double covered = 0.0;
  for (long long j = lo; j <= hi; ++j) {
    r.value += static_cast<double>(std::llabs(a.at(j) - b.at(j))) * weight(j);
    covered += weight(j);
  }
  if (!integers) {
    r.tail = static_cast<double>(a.alphabet.size - 1) * (3.0 - covered);
  } else if (hi < lo) {
    r.tail = INFINITY;
  } else {
    const double cl = static_cast<double>(std::llabs(a.at(lo) - b.at(lo)));
    const double cr = static_cast<double>(std::llabs(a.at(hi) - b.at(hi)));
    r.tail = linear_tail(cr, hi) + linear_tail(cl, -lo);
  }
  return r;
}

TransitionMatrix TransitionMatrix::zeros(int m) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "negative matrix size");
  TransitionMatrix t;
  t.size = m;
  t.entries.assign(static_cast<size_t>(m), std::vector<std::uint8_t>(static_cast<size_t>(m), 0));
  return t;
}

TransitionMatrix TransitionMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  TransitionMatrix t = zeros(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw Error(ErrorCode::InvalidArgument, "transition matrix must be square");
    for (size_t j = 0; j < rows.size(); ++j) {
      if (rows[i][j] != 0 && rows[i][j] != 1) throw Error(ErrorCode::InvalidArgument, "entries must be 0 or 1");
      t.entries[i][j] = static_cast<std::uint8_t>(rows[i][j]);
    }
  }
  return t;
}

std::string TransitionMatrix::json() const {
  std::string s = "[";
  for (int i = 0; i < size; ++i) {
    s += i ? ",[" : "[";
    for (int j = 0; j < size; ++j) s += (j ? "," : "") + std::to_string((*this)(i, j));
    s += "]";
  }
  return s + "]";
}

bool TransitionMatrix::admits(const SymbolWindow& w) const {
  for (long long s : w.symbols)
    if (s < 0 || s >= size) return false;
  for (size_t i = 0; i + 1 < w.symbols.size(); ++i) {
    if (!(*this)(static_cast<int>(w.symbols[i]), static_cast<int>(w.symbols[i + 1]))) return false;
  }
  return true;
}

TransitionMatrix sft_matrix(const CanonicalFamily& family) {
  if (family.spec().kind != FamilyKind::FiniteK) {
    throw Error(ErrorCode::FamilyMismatch, "transition matrices are defined for finite k");
  }
  const int m = family.alphabet_size();
  TransitionMatrix t = TransitionMatrix::zeros(m);
  for (int i = 0; i < m; ++i) {
    const auto [q, side] = family.interior_point(i);
    (void)side;
    const BranchTree tree = enumerate_branches(family.field(), q, 1.5);
    for (const Trajectory& leaf : tree.leaves) {
      const std::vector<double> hits = fold_hit_times(family, leaf);
      if (hits.empty()) throw Error(ErrorCode::EventLocationFailure, "no fold reached from compartment interior");
      const SymbolWindow next = itinerary(family, leaf.shifted(hits.front()), 0, 0);
      t.entries[static_cast<size_t>(i)][static_cast<size_t>(next.symbols.front())] = 1;
    }
  }
  return t;
}

namespace {

using BoolMat = std::vector<std::vector<std::uint8_t>>;

BoolMat bool_product(const BoolMat& a, const BoolMat& b) {
  const size_t n = a.size();
  BoolMat c(n, std::vector<std::uint8_t>(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      if (a[i][k])
        for (size_t j = 0; j < n; ++j) c[i][j] |= b[k][j];
  return c;
}

}  // namespace

MixingResult is_mixing(const TransitionMatrix& m) {
  if (m.size == 0) return {};
  const int limit = (m.size - 1) * (m.size - 1) + 1;
  BoolMat p = m.entries;
  for (int n = 1; n <= limit; ++n) {
    bool positive = true;
    for (const auto& row : p)
      for (std::uint8_t v : row) positive = positive && v;
    if (positive) return {true, n};
    p = bool_product(p, m.entries);
  }
  return {};
}

std::uint64_t periodic_count(const TransitionMatrix& m, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  const size_t s = static_cast<size_t>(m.size);
  std::vector<std::vector<std::uint64_t>> p(s, std::vector<std::uint64_t>(s, 0));
  for (size_t i = 0; i < s; ++i)
    for (size_t j = 0; j < s; ++j) p[i][j] = m.entries[i][j];
  for (int step = 1; step < n; ++step) {
    std::vector<std::vector<std::uint64_t>> q(s, std::vector<std::uint64_t>(s, 0));
    for (size_t i = 0; i < s; ++i)
      for (size_t k = 0; k < s; ++k)
        if (p[i][k])
          for (size_t j = 0; j < s; ++j) q[i][j] += p[i][k] * m.entries[k][j];
    p = std::move(q);
  }
  std::uint64_t tr = 0;
  for (size_t i = 0; i < s; ++i) tr += p[i][i];
  return tr;
}

}  // namespace psvf
