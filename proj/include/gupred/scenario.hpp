/**
 * @file scenario.hpp
 * @brief Scenario files: a small `key = value` format with sections, and the
 *        translation of a parsed file into profiles, potentials and settings.
 *
 * Grammar (one entry per line, `#` starts a comment outside strings):
 *
 *     name = "maggiore2d"
 *     [profile]
 *     kind = "rotational2d"
 *     f = "1 + 0.1*psq"
 *     box = [-2, 2]
 *
 * Values are double-quoted strings, numbers, `true`/`false`, or flat numeric
 * arrays. Every key is validated; unknown sections or keys are errors.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gupred/core_algebra.hpp"
#include "gupred/dynamics.hpp"
#include "gupred/funcdsl.hpp"
#include "gupred/ham_reduction.hpp"

namespace gupred::config {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
  Value value;
  int line = 0;
};

/// Section name -> key -> entry. Top-level keys live in section "".
struct Document {
  std::string source;
  std::map<std::string, std::map<std::string, Entry>> sections;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops a trailing comment, respecting double-quoted strings.
inline std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == '#' && !quoted) {
      return s.substr(0, i);
    }
  }
  return s;
}

inline bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && !s.empty();
}

inline bool is_key(std::string_view k) {
  if (k.empty()) {
    return false;
  }
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

inline Document parse(std::string_view text, const std::string& source = "<memory>") {
  Document doc;
  doc.source = source;
  doc.sections[""];
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw fail("unterminated section header");
      }
      current = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (!detail::is_key(current)) {
        throw fail("bad section name '" + current + "'");
      }
      if (doc.sections.count(current)) {
        throw fail("duplicate section [" + current + "]");
      }
      doc.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw fail("expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view rhs = detail::trim(line.substr(eq + 1));
    if (!detail::is_key(key)) {
      throw fail("bad key '" + key + "'");
    }
    if (rhs.empty()) {
      throw fail("missing value for '" + key + "'");
    }
    Entry entry;
    entry.line = line_no;
    if (rhs.front() == '"') {
      std::string out;
      std::size_t i = 1;
      bool closed = false;
      for (; i < rhs.size(); ++i) {
        const char c = rhs[i];
        if (c == '\\' && i + 1 < rhs.size()) {
          const char n = rhs[++i];
          out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          out.push_back(c);
        }
      }
      if (!closed || i + 1 != rhs.size()) {
        throw fail("malformed string for '" + key + "'");
      }
      entry.value = out;
    } else if (rhs.front() == '[') {
      if (rhs.back() != ']') {
        throw fail("unterminated array for '" + key + "'");
      }
      std::vector<double> values;
      const std::string_view body = detail::trim(rhs.substr(1, rhs.size() - 2));
      std::size_t start = 0;
      while (!body.empty() && start <= body.size()) {
        const auto comma = body.find(',', start);
        const std::string_view item = body.substr(start, comma == std::string_view::npos ? body.size() - start
                                                                                         : comma - start);
        double v = 0.0;
        if (!detail::parse_number(item, v)) {
          throw fail("array '" + key + "' holds a non-numeric item '" + std::string(detail::trim(item)) + "'");
        }
        values.push_back(v);
        if (comma == std::string_view::npos) {
          break;
        }
        start = comma + 1;
      }
      entry.value = values;
    } else if (rhs == "true" || rhs == "false") {
      entry.value = rhs == "true";
    } else {
      double v = 0.0;
      if (!detail::parse_number(rhs, v)) {
        throw fail("cannot read value '" + std::string(rhs) + "' for '" + key + "'");
      }
      entry.value = v;
    }
    auto& sec = doc.sections[current];
    if (sec.count(key)) {
      throw fail("duplicate key '" + key + "'");
    }
    sec[key] = std::move(entry);
  }
  return doc;
}

inline Document load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open scenario file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

/// Typed, consuming access to one section; leftover keys are reported.
class SectionReader {
 public:
  SectionReader(const Document& doc, std::string section) : doc_(&doc), name_(std::move(section)) {
    auto it = doc.sections.find(name_);
    if (it != doc.sections.end()) {
      entries_ = &it->second;
    }
  }

  [[nodiscard]] bool present() const { return entries_ != nullptr; }
  [[nodiscard]] bool has(const std::string& key) const { return entries_ && entries_->count(key); }

  [[nodiscard]] std::vector<std::string> keys() const {
    std::vector<std::string> out;
    if (entries_) {
      for (const auto& [k, _] : *entries_) {
        out.push_back(k);
      }
    }
    return out;
  }

  std::optional<std::string> string(const std::string& key) { return get<std::string>(key, "a string"); }
  std::optional<double> number(const std::string& key) { return get<double>(key, "a number"); }
  std::optional<bool> boolean(const std::string& key) { return get<bool>(key, "true or false"); }
  std::optional<std::vector<double>> array(const std::string& key) { return get<std::vector<double>>(key, "an array"); }

  std::optional<int> integer(const std::string& key) {
    const auto v = number(key);
    if (!v) {
      return std::nullopt;
    }
    if (*v != std::floor(*v) || std::abs(*v) > 1e9) {
      throw error(key, "must be an integer");
    }
    return static_cast<int>(*v);
  }

  std::string require_string(const std::string& key) {
    auto v = string(key);
    if (!v) {
      throw missing(key);
    }
    return *v;
  }

  [[nodiscard]] ConfigError missing(const std::string& key) const {
    return ConfigError(doc_->source + ": missing key '" + key + "' in " + label());
  }

  [[nodiscard]] ConfigError error(const std::string& key, const std::string& msg) const {
    const int line = has(key) ? entries_->at(key).line : 0;
    return ConfigError(doc_->source + ":" + std::to_string(line) + ": '" + key + "' in " + label() + " " + msg);
  }

  /// Throws for any key that was never read.
  void finish() const {
    if (!entries_) {
      return;
    }
    for (const auto& [k, e] : *entries_) {
      if (!used_.count(k)) {
        throw ConfigError(doc_->source + ":" + std::to_string(e.line) + ": unknown key '" + k + "' in " + label());
      }
    }
  }

 private:
  template <typename T>
  std::optional<T> get(const std::string& key, const char* what) {
    if (!has(key)) {
      return std::nullopt;
    }
    used_.insert(key);
    const auto& v = entries_->at(key).value;
    if (const T* p = std::get_if<T>(&v)) {
      return *p;
    }
    throw error(key, std::string("must be ") + what);
  }

  [[nodiscard]] std::string label() const { return name_.empty() ? "top level" : "[" + name_ + "]"; }

  const Document* doc_;
  std::string name_;
  const std::map<std::string, Entry>* entries_ = nullptr;
  std::set<std::string> used_;
};

}  // namespace gupred::config

namespace gupred::cli {

enum class ConstraintKind { none, so2, so3, hamiltonian };

inline const char* to_string(ConstraintKind c) {
  switch (c) {
    case ConstraintKind::none: return "none";
    case ConstraintKind::so2: return "so2";
    case ConstraintKind::so3: return "so3";
    case ConstraintKind::hamiltonian: return "hamiltonian";
  }
  return "?";
}

struct IntegratorSettings {
  dyn::Method method = dyn::Method::implicit_midpoint;
  int steps = 1000;
  double t0 = 0.0;
  double t1 = 1.0;
};

struct ScenarioFile {
  std::string source;
  std::string name;
  int dim = 2;
  ProfileKind kind = ProfileKind::canonical;
  std::string fdef = "1";
  std::optional<std::string> adef;
  std::optional<std::string> potential;
  std::optional<std::string> hamiltonian;
  std::map<std::pair<int, int>, std::string> brackets;  ///< injected L entries, layout indices
  ConstraintKind constraint = ConstraintKind::none;
  std::optional<std::string> grid;
  Box box = Box::uniform(4, -2.0, 2.0);
  std::uint64_t seed = 1;
  IntegratorSettings integrator;
  Vector initial;
  std::optional<Vector> delta1;
  std::optional<Vector> delta2;

  // Built from the text fields above.
  DeformationProfile profile = DeformationProfile::canonical(2);
  ScalarField H = ScalarField::constant(4, 0.0);
  ScalarField V = ScalarField::constant(2, 1.0);

  [[nodiscard]] bool is_bianchi() const { return kind == ProfileKind::bianchi; }
  [[nodiscard]] dsl::VariableLayout layout() const { return dsl::VariableLayout{dim, is_bianchi() ? 0 : 1}; }
  [[nodiscard]] int state_size() const { return is_bianchi() ? 4 : 2 * dim; }
  [[nodiscard]] std::vector<std::string> state_names() const {
    if (is_bianchi()) {
      return {"q1", "q2", "p1", "p2"};
    }
    return layout().names();
  }
};

namespace detail {

inline ProfileKind parse_kind(const std::string& s, const config::SectionReader& r) {
  for (auto k : {ProfileKind::canonical, ProfileKind::rotational2d, ProfileKind::rotational3d, ProfileKind::bianchi,
                 ProfileKind::custom}) {
    if (s == to_string(k)) {
      return k;
    }
  }
  throw r.error("kind", "must be one of canonical, rotational2d, rotational3d, bianchi, custom (got '" + s + "')");
}

inline ConstraintKind parse_constraint(const std::string& s, const config::SectionReader& r) {
  for (auto c : {ConstraintKind::none, ConstraintKind::so2, ConstraintKind::so3, ConstraintKind::hamiltonian}) {
    if (s == to_string(c)) {
      return c;
    }
  }
  throw r.error("type", "must be one of none, so2, so3, hamiltonian (got '" + s + "')");
}

/// Parses an expression field, turning DSL failures into configuration errors naming the key.
inline dsl::Expr expression(const std::string& key, const std::string& text, const config::SectionReader& r) {
  try {
    return dsl::parse(text);
  } catch (const Error& e) {
    throw r.error(key, std::string("is not a valid expression: ") + e.what());
  }
}

inline void require_vars(const std::string& key, const dsl::Expr& e, const std::set<std::string>& allowed,
                         const config::SectionReader& r) {
  for (const auto& v : e.variables()) {
    if (!allowed.count(v)) {
      throw r.error(key, "may not reference '" + v + "'");
    }
  }
}

inline std::set<std::string> momentum_names(const dsl::VariableLayout& layout) {
  std::set<std::string> out{"psq"};
  for (int i = 0; i < layout.dim; ++i) {
    out.insert("p" + std::to_string(layout.first_index + i));
  }
  return out;
}

inline std::set<std::string> phase_names(const dsl::VariableLayout& layout) {
  const auto names = layout.names();
  std::set<std::string> out(names.begin(), names.end());
  out.insert("psq");
  return out;
}

}  // namespace detail

/// Builds a scenario from a parsed document. Everything is validated before
/// any numerical work is attempted.
inline ScenarioFile build_scenario(const config::Document& doc) {
  using config::SectionReader;
  for (const auto& [sec, _] : doc.sections) {
    if (!(sec.empty() || sec == "profile" || sec == "constraint" || sec == "integrator" || sec == "initial")) {
      throw ConfigError(doc.source + ": unknown section [" + sec + "]");
    }
  }
  ScenarioFile sc;
  sc.source = doc.source;

  SectionReader top(doc, "");
  sc.name = top.string("name").value_or("unnamed");
  if (auto s = top.integer("seed")) {
    if (*s < 0) {
      throw top.error("seed", "must be non-negative");
    }
    sc.seed = static_cast<std::uint64_t>(*s);
  }
  top.finish();

  SectionReader prof(doc, "profile");
  if (!prof.present()) {
    throw ConfigError(doc.source + ": missing section [profile]");
  }
  sc.kind = detail::parse_kind(prof.require_string("kind"), prof);
  const auto dim = prof.integer("dim");
  switch (sc.kind) {
    case ProfileKind::rotational2d: sc.dim = 2; break;
    case ProfileKind::rotational3d: sc.dim = 3; break;
    case ProfileKind::bianchi: sc.dim = 3; break;
    default:
      if (!dim) {
        throw prof.missing("dim");
      }
      sc.dim = *dim;
  }
  if (dim && *dim != sc.dim) {
    throw prof.error("dim", "contradicts kind " + std::string(to_string(sc.kind)));
  }
  if (sc.dim < 1 || sc.dim > 9) {
    throw prof.error("dim", "must lie in 1..9");
  }
  const dsl::VariableLayout layout = sc.layout();

  // f
  if (sc.kind == ProfileKind::canonical) {
    if (auto f = prof.string("f"); f && dsl::eval(detail::expression("f", *f, prof), {}) != 1.0) {
      throw prof.error("f", "must be 1 for the canonical kind");
    }
  } else {
    sc.fdef = prof.require_string("f");
  }
  const dsl::Expr fexpr = detail::expression("f", sc.fdef, prof);
  ScalarField f = ScalarField::constant(2 * sc.dim, 1.0);
  if (sc.kind != ProfileKind::canonical) {
    if (is_rotational(sc.kind) || sc.kind == ProfileKind::bianchi) {
      detail::require_vars("f", fexpr, detail::momentum_names(layout), prof);
    } else {
      detail::require_vars("f", fexpr, detail::phase_names(layout), prof);
    }
    if (is_rotational(sc.kind) && !dsl::rotational_guard(fexpr, sc.dim)) {
      throw prof.error("f", "depends on the direction of p; rotational kinds need f = f(|p|)");
    }
    f = dsl::phase_field(fexpr, layout);
  }

  // a
  sc.adef = prof.string("a");
  std::optional<ScalarField> a;
  if (sc.adef) {
    if (!is_rotational(sc.kind)) {
      throw prof.error("a", "is only meaningful for rotational kinds");
    }
    const dsl::Expr aexpr = detail::expression("a", *sc.adef, prof);
    detail::require_vars("a", aexpr, detail::momentum_names(layout), prof);
    if (!dsl::rotational_guard(aexpr, sc.dim)) {
      throw prof.error("a", "depends on the direction of p; rotational kinds need a = a(|p|)");
    }
    a = dsl::phase_field(aexpr, layout);
  }

  // potential / hamiltonian
  sc.potential = prof.string("potential");
  sc.hamiltonian = prof.string("hamiltonian");
  if (sc.kind == ProfileKind::bianchi) {
    if (!sc.potential) {
      throw prof.missing("potential");
    }
    if (sc.hamiltonian) {
      throw prof.error("hamiltonian", "is fixed by the potential for the bianchi kind");
    }
    const dsl::Expr vexpr = detail::expression("potential", *sc.potential, prof);
    detail::require_vars("potential", vexpr, {"q1", "q2"}, prof);
    sc.V = dsl::named_field(vexpr, {"q1", "q2"});
  } else {
    if (sc.potential) {
      throw prof.error("potential", "is only meaningful for the bianchi kind");
    }
    const dsl::Expr hexpr = detail::expression("hamiltonian", sc.hamiltonian.value_or("0.5*psq"), prof);
    detail::require_vars("hamiltonian", hexpr, detail::phase_names(layout), prof);
    sc.H = dsl::phase_field(hexpr, layout);
  }

  // injected bracket entries L<i><j>
  std::vector<BracketEntry> entries;
  for (const auto& key : prof.keys()) {
    if (key.size() != 3 || key[0] != 'L' || !std::isdigit(static_cast<unsigned char>(key[1])) ||
        !std::isdigit(static_cast<unsigned char>(key[2]))) {
      continue;
    }
    const int i = key[1] - '0' - layout.first_index;
    const int j = key[2] - '0' - layout.first_index;
    if (i < 0 || j < 0 || i >= sc.dim || j >= sc.dim || i >= j) {
      throw prof.error(key, "names no strict upper-triangle configuration pair");
    }
    if (is_rotational(sc.kind)) {
      throw prof.error(key, "cannot be set; rotational kinds derive L from the momentum map");
    }
    const std::string text = *prof.string(key);
    const dsl::Expr e = detail::expression(key, text, prof);
    detail::require_vars(key, e, detail::phase_names(layout), prof);
    sc.brackets[{i, j}] = text;
    entries.push_back(BracketEntry{i, j, dsl::phase_field(e, layout)});
  }

  const int n = 2 * sc.dim;
  if (auto b = prof.array("box")) {
    if (b->size() != 2 || !((*b)[0] < (*b)[1])) {
      throw prof.error("box", "must be [lo, hi] with lo < hi");
    }
    sc.box = Box::uniform(n, (*b)[0], (*b)[1]);
  } else {
    sc.box = Box::uniform(n, -2.0, 2.0);
  }
  prof.finish();

  switch (sc.kind) {
    case ProfileKind::canonical: sc.profile = DeformationProfile::canonical(sc.dim); break;
    case ProfileKind::rotational2d:
    case ProfileKind::rotational3d: sc.profile = DeformationProfile::rotational(sc.dim, f, a); break;
    case ProfileKind::bianchi: sc.profile = DeformationProfile::bianchi(f); break;
    case ProfileKind::custom: sc.profile = DeformationProfile::custom(sc.dim, f, {}); break;
  }
  for (auto& e : entries) {
    sc.profile = sc.profile.with_injected(e.i, e.j, std::move(e.value));
  }

  // constraint
  SectionReader con(doc, "constraint");
  const auto ctype = con.string("type");
  sc.constraint = ctype ? detail::parse_constraint(*ctype, con)
                        : (sc.kind == ProfileKind::bianchi ? ConstraintKind::hamiltonian : ConstraintKind::none);
  if (sc.constraint == ConstraintKind::so2 && sc.kind != ProfileKind::rotational2d) {
    throw con.error("type", "so2 needs kind rotational2d");
  }
  if (sc.constraint == ConstraintKind::so3 && sc.kind != ProfileKind::rotational3d) {
    throw con.error("type", "so3 needs kind rotational3d");
  }
  if ((sc.constraint == ConstraintKind::hamiltonian) != (sc.kind == ProfileKind::bianchi)) {
    throw con.error("type", "hamiltonian goes together with kind bianchi");
  }
  sc.grid = con.string("grid");
  con.finish();

  // integrator
  SectionReader integ(doc, "integrator");
  if (auto m = integ.string("method")) {
    if (*m == "rk4") {
      sc.integrator.method = dyn::Method::rk4;
    } else if (*m == "implicit_midpoint") {
      sc.integrator.method = dyn::Method::implicit_midpoint;
    } else {
      throw integ.error("method", "must be rk4 or implicit_midpoint");
    }
  }
  if (auto s = integ.integer("steps")) {
    if (*s < 1) {
      throw integ.error("steps", "must be at least 1");
    }
    sc.integrator.steps = *s;
  }
  sc.integrator.t0 = integ.number("t0").value_or(0.0);
  sc.integrator.t1 = integ.number("t1").value_or(1.0);
  if (sc.integrator.t0 == sc.integrator.t1) {
    throw integ.error("t1", "must differ from t0");
  }
  integ.finish();

  // initial state
  SectionReader init(doc, "initial");
  const int m = sc.state_size();
  if (sc.is_bianchi()) {
    const auto s = init.array("s");
    sc.initial = s ? Eigen::Map<const Vector>(s->data(), static_cast<Eigen::Index>(s->size())) : Vector(Vector::Zero(4));
    if (sc.initial.size() != 4) {
      throw init.error("s", "must hold (q1, q2, p1, p2)");
    }
  } else {
    const auto q = init.array("q");
    const auto p = init.array("p");
    sc.initial = Vector::Zero(m);
    if (q) {
      if (static_cast<int>(q->size()) != sc.dim) {
        throw init.error("q", "must hold " + std::to_string(sc.dim) + " values");
      }
      sc.initial.head(sc.dim) = Eigen::Map<const Vector>(q->data(), sc.dim);
    }
    if (p) {
      if (static_cast<int>(p->size()) != sc.dim) {
        throw init.error("p", "must hold " + std::to_string(sc.dim) + " values");
      }
      sc.initial.tail(sc.dim) = Eigen::Map<const Vector>(p->data(), sc.dim);
    }
  }
  for (const char* key : {"delta1", "delta2"}) {
    if (auto d = init.array(key)) {
      if (static_cast<int>(d->size()) != m) {
        throw init.error(key, "must hold " + std::to_string(m) + " values");
      }
      Vector v = Eigen::Map<const Vector>(d->data(), m);
      (std::string(key) == "delta1" ? sc.delta1 : sc.delta2) = v;
    }
  }
  init.finish();
  if (!sc.initial.allFinite()) {
    throw ConfigError(doc.source + ": initial state is not finite");
  }
  return sc;
}

inline ScenarioFile load_scenario(const std::string& path) { return build_scenario(config::load(path)); }

inline ScenarioFile parse_scenario(std::string_view text, const std::string& source = "<memory>") {
  return build_scenario(config::parse(text, source));
}

}  // namespace gupred::cli
