#include "psvf/psvf.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "psvf/canonical.hpp"
#include "psvf/errors.hpp"
#include "psvf/io.hpp"
#include "psvf/orbit_metric.hpp"
#include "psvf/symbolic.hpp"
#include "psvf/trajectory.hpp"

struct psvf_family {
  psvf::CanonicalFamily value;
};
struct psvf_field {
  psvf::PiecewiseField value;
};
struct psvf_trajectory {
  psvf::Trajectory value;
};

namespace {

thread_local std::string g_last_error;
thread_local long long g_last_index = -1;

template <class F>
psvf_status guard(F&& body) {
  g_last_error.clear();
  g_last_index = -1;
  try {
    body();
    return PSVF_OK;
  } catch (const psvf::InadmissibleWordError& e) {
    g_last_error = e.what();
    g_last_index = e.index();
    return PSVF_E_INADMISSIBLE_WORD;
  } catch (const psvf::Error& e) {
    g_last_error = e.what();
    return static_cast<psvf_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return PSVF_E_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PSVF_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PSVF_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw psvf::Error(psvf::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

psvf::Alphabet alphabet_of(int a) {
  if (a < 0) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "alphabet size must be >= 0");
  return a == 0 ? psvf::Alphabet::integers() : psvf::Alphabet::finite(a);
}

psvf::TransitionMatrix matrix_of(const int* entries, int size) {
  need(entries, "entries");
  if (size <= 0) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "matrix size must be positive");
  std::vector<std::vector<int>> rows(static_cast<size_t>(size));
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) rows[static_cast<size_t>(i)].push_back(entries[i * size + j]);
  return psvf::TransitionMatrix::from_rows(rows);
}

psvf::Polyline points_of(const double* xy, size_t n) {
  if (n > 0) need(xy, "points");
  psvf::Polyline p;
  for (size_t i = 0; i < n; ++i) p.push_back({xy[2 * i], xy[2 * i + 1]});
  return p;
}

}  // namespace

extern "C" {

const char* psvf_version(void) { return psvf::kGeneratorVersion; }

const char* psvf_status_name(psvf_status s) {
  if (s == PSVF_OK) return "Ok";
  if (s == PSVF_E_INTERNAL) return "InternalError";
  if (s >= PSVF_E_INVALID_ARGUMENT && s <= PSVF_E_IO) return psvf::error_code_name(static_cast<psvf::ErrorCode>(s));
  return "Unknown";
}

const char* psvf_last_error(void) { return g_last_error.c_str(); }
long long psvf_last_error_index(void) { return g_last_index; }
void psvf_string_free(char* s) { std::free(s); }

psvf_status psvf_family_create(const char* kind, int window, psvf_family** out) {
  return guard([&] {
    need(kind, "kind");
    need(out, "out");
    if (window < 0) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "window must be >= 0");
    const psvf::FamilySpec spec = psvf::parse_family(kind);
    *out = new psvf_family{psvf::CanonicalFamily::make(spec, window == 0 ? 64 : window)};
  });
}

void psvf_family_destroy(psvf_family* f) { delete f; }

psvf_status psvf_family_label(const psvf_family* f, char** out) {
  return guard([&] {
    need(f, "family");
    need(out, "out");
    *out = dup(f->value.spec().label());
  });
}

psvf_status psvf_family_alphabet_size(const psvf_family* f, int* out) {
  return guard([&] {
    need(f, "family");
    need(out, "out");
    *out = f->value.symbolic() ? f->value.alphabet_size() : 0;
  });
}

psvf_status psvf_family_describe(const psvf_family* f, char** json_out) {
  return guard([&] {
    need(f, "family");
    need(json_out, "json_out");
    *json_out = dup(psvf::describe_family(f->value).dump(2));
  });
}

psvf_status psvf_family_portrait_svg(const psvf_family* f, char** svg_out) {
  return guard([&] {
    need(f, "family");
    need(svg_out, "svg_out");
    *svg_out = dup(psvf::portrait_svg(f->value));
  });
}

psvf_status psvf_family_field(const psvf_family* f, psvf_field** out) {
  return guard([&] {
    need(f, "family");
    need(out, "out");
    *out = new psvf_field{f->value.field()};
  });
}

psvf_status psvf_poly_pk(int k, double x, int order, double* out) {
  return guard([&] {
    need(out, "out");
    *out = psvf::poly_Pk(k, x, order);
  });
}

psvf_status psvf_poly_pk_coefficients(int k, char** json_out) {
  return guard([&] {
    need(json_out, "json_out");
    *json_out = dup(psvf::pk_coefficients_json(k).dump());
  });
}

psvf_status psvf_field_from_json(const char* json, psvf_field** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new psvf_field{psvf::field_from_json(json)};
  });
}

void psvf_field_destroy(psvf_field* z) { delete z; }

psvf_status psvf_field_eval(const psvf_field* z, int upper, double x, double y, double* vx, double* vy) {
  return guard([&] {
    need(z, "field");
    need(vx, "vx");
    need(vy, "vy");
    const psvf::Vec2 v = upper ? z->value.upper({x, y}) : z->value.lower({x, y});
    *vx = v.x;
    *vy = v.y;
  });
}

psvf_status psvf_field_classify(const psvf_field* z, double x, double y, char** json_out) {
  return guard([&] {
    need(z, "field");
    need(json_out, "json_out");
    const psvf::Vec2 p{x, y};
    nlohmann::json j;
    j["region"] = psvf::to_string(psvf::classify_point(z->value, p));
    try {
      const psvf::FoldClass c = psvf::classify_fold(z->value, p);
      nlohmann::json f;
      if (c.upper) f["upper"] = psvf::to_string(*c.upper);
      if (c.lower) f["lower"] = psvf::to_string(*c.lower);
      if (c.two_fold) f["two_fold"] = psvf::to_string(*c.two_fold);
      j["fold"] = f;
    } catch (const psvf::Error& e) {
      if (e.code() != psvf::ErrorCode::NotATangency) throw;
      j["fold"] = nullptr;
    }
    *json_out = dup(j.dump());
  });
}

psvf_status psvf_field_sliding(const psvf_field* z, double x, double y, double* vx, double* vy) {
  return guard([&] {
    need(z, "field");
    need(vx, "vx");
    need(vy, "vy");
    const psvf::Vec2 v = psvf::sliding_field(z->value, {x, y});
    *vx = v.x;
    *vy = v.y;
  });
}

psvf_status psvf_field_describe(const psvf_field* z, char** json_out) {
  return guard([&] {
    need(z, "field");
    need(json_out, "json_out");
    *json_out = dup(psvf::describe_field(z->value).dump(2));
  });
}

psvf_status psvf_field_portrait_svg(const psvf_field* z, char** svg_out) {
  return guard([&] {
    need(z, "field");
    need(svg_out, "svg_out");
    *svg_out = dup(psvf::portrait_svg(z->value));
  });
}

void psvf_trajectory_destroy(psvf_trajectory* g) { delete g; }

psvf_status psvf_traj_synthesize(const psvf_family* f, const char* word, long long offset, psvf_trajectory** out) {
  return guard([&] {
    need(f, "family");
    need(word, "word");
    need(out, "out");
    if (!f->value.symbolic()) throw psvf::Error(psvf::ErrorCode::FamilyMismatch, "the bean field has no symbol words");
    const int a = f->value.alphabet_size();
    const psvf::SymbolWindow w = psvf::parse_window(word, alphabet_of(a), offset);
    *out = new psvf_trajectory{psvf::trajectory_from_symbols(f->value, w)};
  });
}

psvf_status psvf_traj_branches(const psvf_field* z, double x, double y, double horizon, size_t max_branches,
                               const double* slide_stops, size_t n_stops, char** json_out) {
  return guard([&] {
    need(z, "field");
    need(json_out, "json_out");
    if (!(horizon > 0.0)) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "horizon must be positive");
    psvf::BranchOptions o;
    if (max_branches > 0) o.max_branches = max_branches;
    if (n_stops > 0) need(slide_stops, "slide_stops");
    o.slide_stops.assign(slide_stops, slide_stops + n_stops);
    *json_out = dup(psvf::branch_tree_json(psvf::enumerate_branches(z->value, {x, y}, horizon, o)).dump());
  });
}

psvf_status psvf_traj_simulate(const psvf_field* z, double x, double y, double horizon, const char* choices,
                               psvf_trajectory** out) {
  return guard([&] {
    need(z, "field");
    need(out, "out");
    if (!(horizon > 0.0)) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "horizon must be positive");
    std::vector<psvf::Mode> plan;
    if (choices && *choices) {
      std::stringstream ss(choices);
      std::string item;
      while (std::getline(ss, item, ',')) plan.push_back(psvf::mode_from_string(item));
    }
    size_t next = 0;
    psvf::Chooser choose = [&](const psvf::Trajectory&, psvf::Vec2, double t, const std::vector<psvf::Mode>& opts) {
      if (next < plan.size()) {
        const psvf::Mode m = plan[next++];
        for (psvf::Mode o : opts)
          if (o == m) return psvf::Choice{m, std::nullopt};
        throw psvf::Error(psvf::ErrorCode::InvalidArgument,
                          std::string("continuation ") + psvf::to_string(m) + " not available at t=" + std::to_string(t));
      }
      return psvf::Choice{opts.front(), std::nullopt};
    };
    *out = new psvf_trajectory{psvf::simulate(z->value, {x, y}, 0.0, horizon, choose)};
  });
}

psvf_status psvf_traj_from_csv(const char* csv, psvf_trajectory** out) {
  return guard([&] {
    need(csv, "csv");
    need(out, "out");
    *out = new psvf_trajectory{psvf::trajectory_from_csv(csv)};
  });
}

psvf_status psvf_traj_csv(const psvf_trajectory* g, int per_arc, char** csv_out) {
  return guard([&] {
    need(g, "trajectory");
    need(csv_out, "csv_out");
    *csv_out = dup(psvf::trajectory_csv(g->value, per_arc <= 0 ? 512 : per_arc));
  });
}

psvf_status psvf_traj_json(const psvf_trajectory* g, char** json_out) {
  return guard([&] {
    need(g, "trajectory");
    need(json_out, "json_out");
    *json_out = dup(psvf::trajectory_json(g->value).dump());
  });
}

psvf_status psvf_traj_span(const psvf_trajectory* g, double* t0, double* t1) {
  return guard([&] {
    need(g, "trajectory");
    need(t0, "t0");
    need(t1, "t1");
    *t0 = g->value.t_begin();
    *t1 = g->value.t_end();
  });
}

psvf_status psvf_traj_at(const psvf_trajectory* g, double t, double* x, double* y) {
  return guard([&] {
    need(g, "trajectory");
    need(x, "x");
    need(y, "y");
    const psvf::Vec2 p = g->value.at(t);
    *x = p.x;
    *y = p.y;
  });
}

psvf_status psvf_traj_time_one(const psvf_trajectory* g, psvf_trajectory** out) {
  return guard([&] {
    need(g, "trajectory");
    need(out, "out");
    *out = new psvf_trajectory{psvf::time_one(g->value)};
  });
}

psvf_status psvf_traj_itinerary(const psvf_family* f, const psvf_trajectory* g, long long lo, long long hi, double tol,
                                char** json_out) {
  return guard([&] {
    need(f, "family");
    need(g, "trajectory");
    need(json_out, "json_out");
    if (!(tol > 0.0)) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "tolerance must be positive");
    *json_out = dup(psvf::window_json(psvf::itinerary(f->value, g->value, lo, hi, tol)).dump());
  });
}

psvf_status psvf_bean_trajectory(const psvf_family* bean, double y0, const int* kinds, const double* exits,
                                 size_t loops, psvf_trajectory** out) {
  return guard([&] {
    need(bean, "family");
    need(out, "out");
    if (loops > 0) need(kinds, "kinds");
    std::vector<psvf::BeanChoice> choices;
    for (size_t i = 0; i < loops; ++i) {
      psvf::BeanChoice c;
      if (kinds[i] < 0 || kinds[i] > 2) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "loop kind must be 0, 1 or 2");
      c.kind = static_cast<psvf::BeanChoice::Kind>(kinds[i]);
      if (c.kind != psvf::BeanChoice::Outer) {
        need(exits, "exits");
        c.u = exits[i];
      }
      choices.push_back(c);
    }
    *out = new psvf_trajectory{psvf::bean_trajectory(bean->value, y0, choices)};
  });
}

psvf_status psvf_bean_return_time(const psvf_family* bean, const psvf_trajectory* g, double* out) {
  return guard([&] {
    need(bean, "family");
    need(g, "trajectory");
    need(out, "out");
    *out = psvf::return_time(bean->value, g->value);
  });
}

psvf_status psvf_shift_metric(const char* w1, const char* w2, int alphabet, long long offset, double* value,
                              double* tail) {
  return guard([&] {
    need(w1, "w1");
    need(w2, "w2");
    need(value, "value");
    need(tail, "tail");
    const psvf::Alphabet a = alphabet_of(alphabet);
    const psvf::MetricBound m = psvf::metric_d(psvf::parse_window(w1, a, offset), psvf::parse_window(w2, a, offset));
    *value = m.value;
    *tail = m.tail;
  });
}

psvf_status psvf_shift_apply(const char* w, int alphabet, long long offset, long long steps, char** json_out) {
  return guard([&] {
    need(w, "w");
    need(json_out, "json_out");
    *json_out = dup(psvf::window_json(psvf::shift(psvf::parse_window(w, alphabet_of(alphabet), offset), steps)).dump());
  });
}

psvf_status psvf_theta_inf_admissible(const char* w, int* out) {
  return guard([&] {
    need(w, "w");
    need(out, "out");
    *out = psvf::theta_inf_admissible(psvf::parse_window(w, psvf::Alphabet::integers())) ? 1 : 0;
  });
}

psvf_status psvf_sft_matrix(const psvf_family* f, int* entries, int capacity, int* size) {
  return guard([&] {
    need(f, "family");
    need(size, "size");
    const psvf::TransitionMatrix m = psvf::sft_matrix(f->value);
    *size = m.size;
    if (capacity < m.size * m.size) {
      throw psvf::Error(psvf::ErrorCode::InvalidArgument,
                        "buffer holds " + std::to_string(capacity) + " entries, " + std::to_string(m.size * m.size) +
                            " needed");
    }
    need(entries, "entries");
    for (int i = 0; i < m.size; ++i)
      for (int j = 0; j < m.size; ++j) entries[i * m.size + j] = m(i, j);
  });
}

psvf_status psvf_matrix_is_mixing(const int* entries, int size, int* mixing, int* n0) {
  return guard([&] {
    need(mixing, "mixing");
    need(n0, "n0");
    const psvf::MixingResult r = psvf::is_mixing(matrix_of(entries, size));
    *mixing = r.mixing ? 1 : 0;
    *n0 = r.n0;
  });
}

psvf_status psvf_matrix_periodic_count(const int* entries, int size, int n, uint64_t* out) {
  return guard([&] {
    need(out, "out");
    *out = psvf::periodic_count(matrix_of(entries, size), n);
  });
}

psvf_status psvf_hausdorff(const double* a, size_t na, const double* b, size_t nb, int polyline, double* out) {
  return guard([&] {
    need(out, "out");
    *out = psvf::hausdorff(points_of(a, na), points_of(b, nb),
                           polyline ? psvf::HausdorffMode::Polyline : psvf::HausdorffMode::Points);
  });
}

psvf_status psvf_rho(const psvf_family* f, const psvf_trajectory* a, const psvf_trajectory* b, int n, double* value,
                     double* tail) {
  return guard([&] {
    need(f, "family");
    need(a, "a");
    need(b, "b");
    need(value, "value");
    need(tail, "tail");
    const psvf::MetricBound m = psvf::rho(f->value, a->value, b->value, n);
    *value = m.value;
    *tail = m.tail;
  });
}

psvf_status psvf_verify_conjugacy(const psvf_family* f, int samples, int depth, uint64_t seed, char** json_out,
                                  int* pass) {
  return guard([&] {
    need(f, "family");
    need(json_out, "json_out");
    need(pass, "pass");
    if (samples <= 0 || depth <= 0) throw psvf::Error(psvf::ErrorCode::InvalidArgument, "samples and depth must be positive");
    psvf::ConjugacyOptions o;
    o.samples = samples;
    o.depth = depth;
    o.seed = seed;
    const nlohmann::json r = psvf::verify_conjugacy(f->value, o);
    *pass = r.at("pass").get<bool>() ? 1 : 0;
    *json_out = dup(r.dump(2));
  });
}

psvf_status psvf_verify_equivalence(const psvf_field* a, const psvf_field* b, uint64_t seed, char** json_out, int* pass) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(json_out, "json_out");
    need(pass, "pass");
    psvf::EquivalenceOptions o;
    o.seed = seed;
    const nlohmann::json r = psvf::sigma_equivalence_check(a->value, b->value, o);
    *pass = r.at("pass").get<bool>() ? 1 : 0;
    *json_out = dup(r.dump(2));
  });
}

}  // extern "C"
