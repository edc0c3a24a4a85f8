#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psvf/psvf.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

void check(psvf_status s) {
  if (s == PSVF_OK) return;
  std::string msg = std::string(psvf_status_name(s)) + ": " + psvf_last_error();
  if (s == PSVF_E_INADMISSIBLE_WORD) {
    msg = std::string("InadmissibleWord at index ") + std::to_string(psvf_last_error_index()) + ": " + psvf_last_error();
    throw Failure{kExitFailure, msg};
  }
  const bool usage = s == PSVF_E_INVALID_ARGUMENT || s == PSVF_E_PARSE || s == PSVF_E_IO ||
                     s == PSVF_E_ALPHABET_MISMATCH || s == PSVF_E_FAMILY_MISMATCH;
  throw Failure{usage ? kExitUsage : kExitFailure, msg};
}

struct CString {
  char* p = nullptr;
  ~CString() { psvf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct FamilyDel {
  void operator()(psvf_family* f) const { psvf_family_destroy(f); }
};
struct FieldDel {
  void operator()(psvf_field* f) const { psvf_field_destroy(f); }
};
struct TrajDel {
  void operator()(psvf_trajectory* g) const { psvf_trajectory_destroy(g); }
};
using Family = std::unique_ptr<psvf_family, FamilyDel>;
using Field = std::unique_ptr<psvf_field, FieldDel>;
using Traj = std::unique_ptr<psvf_trajectory, TrajDel>;

Family make_family(const std::string& kind, int window) {
  psvf_family* f = nullptr;
  check(psvf_family_create(kind.c_str(), window, &f));
  return Family(f);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Failure{kExitUsage, "cannot write " + out};
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// A field given as a canonical family name or a JSON file.
Field load_field(const std::string& spec, int window) {
  psvf_field* z = nullptr;
  if (!ends_with(spec, ".json")) {
    Family f = make_family(spec, window);
    check(psvf_family_field(f.get(), &z));
  } else {
    check(psvf_field_from_json(read_file(spec).c_str(), &z));
  }
  return Field(z);
}

std::pair<long long, long long> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw Failure{kExitUsage, "window must look like lo..hi, got '" + text + "'"};
  try {
    size_t used = 0;
    const long long lo = std::stoll(text.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument("lo");
    const std::string rest = text.substr(dots + 2);
    const long long hi = std::stoll(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("hi");
    if (hi < lo) throw std::invalid_argument("order");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Failure{kExitUsage, "window must look like lo..hi with lo <= hi, got '" + text + "'"};
  }
}

// "p1".."p{k-1}" (folds), "r0", "r1", or "x,y".
std::pair<double, double> parse_point(const std::string& text, const std::string& kind, int window) {
  if (!text.empty() && (text[0] == 'p' || text[0] == 'r')) {
    Family f = make_family(kind, window);
    CString d;
    check(psvf_family_describe(f.get(), &d.p));
    const json j = json::parse(d.str());
    int idx = 0;
    try {
      idx = std::stoi(text.substr(1));
    } catch (const std::logic_error&) {
      throw Failure{kExitUsage, "bad point name '" + text + "'"};
    }
    if (text[0] == 'p' && j.contains("folds")) {
      for (const json& fold : j["folds"]) {
        const long long id = fold["id"].get<long long>();
        const bool finite = j["alphabet"].is_number();
        if ((finite && id + 1 == idx) || (!finite && id == idx)) {
          return {fold["point"][0].get<double>(), fold["point"][1].get<double>()};
        }
      }
    }
    if (text[0] == 'r' && j.contains("crossing_points") && idx >= 0 &&
        idx < static_cast<int>(j["crossing_points"].size())) {
      const json& p = j["crossing_points"][static_cast<size_t>(idx)]["point"];
      return {p[0].get<double>(), p[1].get<double>()};
    }
    throw Failure{kExitUsage, "no point named '" + text + "' in family " + kind};
  }
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Failure{kExitUsage, "point must be p<j>, r<i> or x,y"};
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw Failure{kExitUsage, "bad point '" + text + "'"};
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw Failure{kExitUsage, "bad number '" + item + "'"};
    }
  }
  return out;
}

std::vector<int> parse_matrix(const std::string& text, int& size) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw Failure{kExitUsage, "matrix must be a JSON array of rows"};
  }
  if (!j.is_array() || j.empty()) throw Failure{kExitUsage, "matrix must be a non-empty JSON array of rows"};
  size = static_cast<int>(j.size());
  std::vector<int> out;
  for (const json& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != size) throw Failure{kExitUsage, "matrix must be square"};
    for (const json& v : row) out.push_back(v.get<int>());
  }
  return out;
}

std::vector<int> family_matrix(const std::string& kind, int& size) {
  Family f = make_family(kind, 0);
  int a = 0;
  check(psvf_family_alphabet_size(f.get(), &a));
  std::vector<int> m(static_cast<size_t>(a) * static_cast<size_t>(a));
  check(psvf_sft_matrix(f.get(), m.data(), static_cast<int>(m.size()), &size));
  return m;
}

json matrix_json(const std::vector<int>& m, int size) {
  json rows = json::array();
  for (int i = 0; i < size; ++i) {
    json r = json::array();
    for (int j = 0; j < size; ++j) r.push_back(m[static_cast<size_t>(i * size + j)]);
    rows.push_back(r);
  }
  return rows;
}

// Kind whose invariant set carries the trajectory: the first family whose
// itinerary over the window succeeds.
std::string detect_kind(const psvf_trajectory* g, long long lo, long long hi, double tol) {
  std::vector<std::string> kinds;
  for (int k = 2; k <= 40; ++k) kinds.push_back("k" + std::to_string(k));
  kinds.push_back("inf");
  for (const std::string& kind : kinds) {
    Family f = make_family(kind, 0);
    CString out;
    if (psvf_traj_itinerary(f.get(), g, lo, hi, tol, &out.p) == PSVF_OK) return kind;
  }
  throw Failure{kExitFailure, "the trajectory does not lie on the invariant set of any canonical family"};
}

std::string first_counterexample(const json& report) {
  for (const json& c : report.value("checks", json::array())) {
    if (!c.value("pass", true)) {
      std::string s = "check '" + c.value("name", std::string("?")) + "' failed";
      if (c.contains("counterexample")) s += ": " + c["counterexample"].dump();
      return s;
    }
  }
  return "verification failed";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise smooth vector fields: canonical families, branching trajectories, symbolic dynamics"};
  app.set_config("--config", "", "TOML or INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  std::string out;
  int window = 0;
  app.add_option("--seed", seed, "Seed for every randomized sample")->capture_default_str();
  app.add_option("--out", out, "Output file (stdout when omitted)");
  app.add_option("--window-folds", window, "Fold range of the infinite family (0 = default)")
      ->check(CLI::NonNegativeNumber);

  int rc = kExitOk;

  // fields ------------------------------------------------------------------
  auto* fields = app.add_subcommand("fields", "Inspect canonical families and field files");
  fields->require_subcommand(1);
  std::string f_kind, f_field;
  auto* describe = fields->add_subcommand("describe", "Folds, crossing points, Σ regions and compartments as JSON");
  describe->add_option("--kind", f_kind, "k2..k40, inf or bean");
  describe->add_option("--field", f_field, "Field JSON file");
  auto* fportrait = fields->add_subcommand("portrait", "SVG phase portrait");
  fportrait->add_option("--kind", f_kind, "k2..k40, inf or bean");
  fportrait->add_option("--field", f_field, "Field JSON file");
  auto* portrait = app.add_subcommand("portrait", "SVG phase portrait (same as fields portrait)");
  portrait->add_option("--kind", f_kind, "k2..k40, inf or bean");
  portrait->add_option("--field", f_field, "Field JSON file");

  auto field_or_kind = [&](bool want_svg) {
    if (f_kind.empty() == f_field.empty()) throw Failure{kExitUsage, "give exactly one of --kind and --field"};
    CString text;
    if (!f_kind.empty()) {
      Family f = make_family(f_kind, window);
      check(want_svg ? psvf_family_portrait_svg(f.get(), &text.p) : psvf_family_describe(f.get(), &text.p));
    } else {
      Field z = load_field(f_field, window);
      check(want_svg ? psvf_field_portrait_svg(z.get(), &text.p) : psvf_field_describe(z.get(), &text.p));
    }
    emit(text.str(), out);
  };
  describe->callback([&] { field_or_kind(false); });
  fportrait->callback([&] { field_or_kind(true); });
  portrait->callback([&] { field_or_kind(true); });

  // traj --------------------------------------------------------------------
  auto* traj = app.add_subcommand("traj", "Simulate, synthesize and encode trajectories");
  traj->require_subcommand(1);
  std::string t_kind = "k2", t_field, t_from, t_branches = "all", t_stops, t_word, t_in, t_window;
  double t_horizon = 4.0, t_tol = 1e-4;
  std::size_t t_max = 4096;
  long long t_offset = 0;
  int t_per_arc = 512;

  auto* sim = traj->add_subcommand("simulate", "Forward branch tree, or one branch, from a point");
  sim->add_option("--kind", t_kind, "Canonical family (ignored with --field)")->capture_default_str();
  sim->add_option("--field", t_field, "Field JSON file");
  sim->add_option("--from", t_from, "Start: p<j> (fold), r<i> (crossing point) or x,y")->required();
  sim->add_option("--horizon", t_horizon, "Time horizon")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--branches", t_branches,
                  "'all' for the branch tree, 'first' or a comma list of upper/lower/sliding for one branch")
      ->capture_default_str();
  sim->add_option("--max-branches", t_max, "Leaf budget of the branch tree")->capture_default_str();
  sim->add_option("--slide-stops", t_stops, "Σ abscissas where sliding may be left, comma separated");
  sim->add_option("--per-arc", t_per_arc, "CSV samples per arc")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  sim->callback([&] {
    Field z = load_field(t_field.empty() ? t_kind : t_field, window);
    const auto [x, y] = parse_point(t_from, t_kind, window);
    if (t_branches == "all") {
      const std::vector<double> stops = t_stops.empty() ? std::vector<double>{} : parse_list(t_stops);
      CString j;
      check(psvf_traj_branches(z.get(), x, y, t_horizon, t_max, stops.data(), stops.size(), &j.p));
      emit(json::parse(j.str()).dump(1), out);
      return;
    }
    psvf_trajectory* g = nullptr;
    check(psvf_traj_simulate(z.get(), x, y, t_horizon, t_branches == "first" ? "" : t_branches.c_str(), &g));
    Traj tr(g);
    CString text;
    if (ends_with(out, ".csv")) check(psvf_traj_csv(tr.get(), t_per_arc, &text.p));
    else check(psvf_traj_json(tr.get(), &text.p));
    emit(text.str(), out);
  });

  auto* synth = traj->add_subcommand("synth", "Trajectory through the compartments named by a word");
  synth->add_option("--kind", t_kind, "k2..k40 or inf")->capture_default_str();
  synth->add_option("--word", t_word, "One digit per symbol, or comma separated integers")->required();
  synth->add_option("--offset", t_offset, "Index of the first symbol")->capture_default_str();
  synth->add_option("--per-arc", t_per_arc, "CSV samples per arc")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  synth->callback([&] {
    Family f = make_family(t_kind, window);
    psvf_trajectory* g = nullptr;
    check(psvf_traj_synthesize(f.get(), t_word.c_str(), t_offset, &g));
    Traj tr(g);
    CString text;
    if (ends_with(out, ".json")) check(psvf_traj_json(tr.get(), &text.p));
    else check(psvf_traj_csv(tr.get(), t_per_arc, &text.p));
    emit(text.str(), out);
  });

  auto* itin = traj->add_subcommand("itinerary", "Symbol window of a trajectory CSV");
  itin->add_option("--in", t_in, "Trajectory CSV (t,x,y,governing)")->required();
  itin->add_option("--window", t_window, "Index range lo..hi (default: everything the trajectory covers)");
  itin->add_option("--kind", t_kind, "Family, or 'auto' to detect it")->default_str("auto");
  itin->add_option("--tol", t_tol, "Allowed distance from the invariant set")->capture_default_str()->check(
      CLI::PositiveNumber);
  itin->callback([&] {
    psvf_trajectory* g = nullptr;
    check(psvf_traj_from_csv(read_file(t_in).c_str(), &g));
    Traj tr(g);
    long long lo = 0, hi = 0;
    double a = 0.0, b = 0.0;
    check(psvf_traj_span(tr.get(), &a, &b));
    if (!t_window.empty()) {
      std::tie(lo, hi) = parse_range(t_window);
      if (static_cast<double>(lo) < a || static_cast<double>(hi) + 0.5 > b) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "trajectory covers t in [%g, %g]; window %lld..%lld needs [%lld, %lld.5]", a, b, lo,
                      hi, lo, hi);
        throw Failure{kExitUsage, buf};
      }
    } else {
      lo = static_cast<long long>(std::ceil(a));
      hi = static_cast<long long>(std::floor(b - 0.5));
      if (hi < lo) throw Failure{kExitUsage, "trajectory is shorter than one unit"};
    }
    const std::string kind = itin->count("--kind") && t_kind != "auto" ? t_kind : detect_kind(tr.get(), lo, hi, t_tol);
    Family f = make_family(kind, window);
    CString j;
    check(psvf_traj_itinerary(f.get(), tr.get(), lo, hi, t_tol, &j.p));
    json r = json::parse(j.str());
    r["family"] = kind;
    emit(r.dump(), out);
  });

  // shift -------------------------------------------------------------------
  auto* shiftc = app.add_subcommand("shift", "Symbol spaces, shifts and transition matrices");
  shiftc->require_subcommand(1);
  int s_alphabet = 2, s_k = 2, s_n = 8;
  std::string s_w1, s_w2, s_matrix, s_w;
  long long s_offset = 0, s_steps = 1;

  auto* metric = shiftc->add_subcommand("metric", "Distance of two windows plus a tail bound");
  metric->add_option("--alphabet", s_alphabet, "Alphabet size, 0 for the integers")->capture_default_str();
  metric->add_option("--w1", s_w1, "First window")->required();
  metric->add_option("--w2", s_w2, "Second window")->required();
  metric->add_option("--offset", s_offset, "Index of the first entry")->capture_default_str();
  metric->callback([&] {
    double v = 0.0, tail = 0.0;
    check(psvf_shift_metric(s_w1.c_str(), s_w2.c_str(), s_alphabet, s_offset, &v, &tail));
    emit(json{{"value", v}, {"tail", tail}, {"upper", v + tail}}.dump(), out);
  });

  auto* apply = shiftc->add_subcommand("apply", "Shift a window by a number of steps");
  apply->add_option("--alphabet", s_alphabet, "Alphabet size, 0 for the integers")->capture_default_str();
  apply->add_option("--w", s_w, "Window")->required();
  apply->add_option("--offset", s_offset, "Index of the first entry")->capture_default_str();
  apply->add_option("--steps", s_steps, "Number of shifts")->capture_default_str();
  apply->callback([&] {
    CString j;
    check(psvf_shift_apply(s_w.c_str(), s_alphabet, s_offset, s_steps, &j.p));
    emit(j.str(), out);
  });

  auto* admissible = shiftc->add_subcommand("admissible", "Whether an integer window has steps of size at most 2");
  admissible->add_option("--w", s_w, "Comma separated integers")->required();
  admissible->callback([&] {
    int ok = 0;
    check(psvf_theta_inf_admissible(s_w.c_str(), &ok));
    emit(json{{"admissible", ok == 1}}.dump(), out);
  });

  auto add_matrix_source = [&](CLI::App* c) {
    c->add_option("--k", s_k, "Canonical family k (matrix computed by simulation)")->capture_default_str();
    c->add_option("--matrix", s_matrix, "Explicit matrix as a JSON array of rows");
  };
  auto matrix_source = [&](int& size) {
    return s_matrix.empty() ? family_matrix("k" + std::to_string(s_k), size) : parse_matrix(s_matrix, size);
  };

  auto* matrix = shiftc->add_subcommand("matrix", "Transition matrix of the compartments");
  add_matrix_source(matrix);
  matrix->callback([&] {
    int size = 0;
    const std::vector<int> m = matrix_source(size);
    emit(matrix_json(m, size).dump(), out);
  });

  auto* mixing = shiftc->add_subcommand("mixing", "Primitivity of the transition matrix");
  add_matrix_source(mixing);
  mixing->callback([&] {
    int size = 0;
    const std::vector<int> m = matrix_source(size);
    int mix = 0, n0 = 0;
    check(psvf_matrix_is_mixing(m.data(), size, &mix, &n0));
    json r{{"mixing", mix == 1}};
    if (mix) r["n0"] = n0;
    emit(r.dump(), out);
  });

  auto* periodic = shiftc->add_subcommand("periodic", "Number of period-n points, n = 1..N");
  add_matrix_source(periodic);
  periodic->add_option("--n", s_n, "Largest period")->capture_default_str()->check(CLI::Range(1, 64));
  periodic->callback([&] {
    int size = 0;
    const std::vector<int> m = matrix_source(size);
    json counts = json::array();
    for (int n = 1; n <= s_n; ++n) {
      uint64_t c = 0;
      check(psvf_matrix_periodic_count(m.data(), size, n, &c));
      counts.push_back(c);
    }
    emit(json{{"periodic_counts", counts}}.dump(), out);
  });

  // verify ------------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Conjugacy and Σ-equivalence reports");
  verify->require_subcommand(1);
  std::string v_kind = "k2", v_report, v_a, v_b;
  int v_samples = 100, v_depth = 10;
  auto* conj = verify->add_subcommand("conjugacy", "Check the time-one/return map against the shift");
  conj->add_option("--kind", v_kind, "k2..k40, inf or bean")->capture_default_str();
  conj->add_option("--samples", v_samples, "Random samples per check")->capture_default_str()->check(CLI::PositiveNumber);
  conj->add_option("--depth", v_depth, "Branch tree depth")->capture_default_str()->check(CLI::PositiveNumber);
  conj->add_option("--report", v_report, "Write the JSON report here (same as --out)");
  conj->callback([&] {
    Family f = make_family(v_kind, window);
    CString j;
    int pass = 0;
    check(psvf_verify_conjugacy(f.get(), v_samples, v_depth, seed, &j.p, &pass));
    const std::string dest = v_report.empty() ? out : v_report;
    emit(j.str(), dest);
    if (!dest.empty()) std::cout << (pass ? "PASS" : "FAIL") << " conjugacy " << v_kind << "\n";
    if (!pass) {
      std::cerr << first_counterexample(json::parse(j.str())) << "\n";
      rc = kExitFailure;
    }
  });
  auto* equiv = verify->add_subcommand("equivalence", "Build and check a Σ-equivalence between two fields");
  equiv->add_option("--a", v_a, "First field: JSON file or family name")->required();
  equiv->add_option("--b", v_b, "Second field: JSON file or family name")->required();
  equiv->add_option("--report", v_report, "Write the JSON report here (same as --out)");
  equiv->callback([&] {
    Field a = load_field(v_a, window), b = load_field(v_b, window);
    CString j;
    int pass = 0;
    const psvf_status s = psvf_verify_equivalence(a.get(), b.get(), seed, &j.p, &pass);
    const std::string dest = v_report.empty() ? out : v_report;
    if (s == PSVF_E_SKELETON_MISMATCH) {
      const json r{{"pass", false}, {"error", "SkeletonMismatch"}, {"message", psvf_last_error()}};
      emit(r.dump(2), dest);
      std::cerr << "SkeletonMismatch: " << psvf_last_error() << "\n";
      rc = kExitFailure;
      return;
    }
    check(s);
    emit(j.str(), dest);
    if (!dest.empty()) std::cout << (pass ? "PASS" : "FAIL") << " equivalence\n";
    if (!pass) {
      std::cerr << first_counterexample(json::parse(j.str())) << "\n";
      rc = kExitFailure;
    }
  });

  std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
    for (CLI::App* sub : a->get_subcommands({})) {
      sub->fallthrough();
      fall(sub);
    }
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitUsage;
  }
  return rc;
}
