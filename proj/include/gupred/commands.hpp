/**
 * @file commands.hpp
 * @brief verify / reduce / evolve, the three batch commands behind `gupred`.
 *
 * Every command writes to caller-supplied streams and returns a process exit
 * code: 0 ok, 1 check failure, 2 configuration error, 3 runtime failure.
 */
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gupred/core_algebra.hpp"
#include "gupred/dynamics.hpp"
#include "gupred/group_reduction.hpp"
#include "gupred/ham_reduction.hpp"
#include "gupred/numcalc.hpp"
#include "gupred/sampling.hpp"
#include "gupred/scenario.hpp"

namespace gupred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;
  std::optional<std::string> out;
};

/// %.17g, round-trip exact for doubles.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct CheckResult {
  std::string name;
  double max = 0.0;
  double tol = 0.0;

  [[nodiscard]] bool pass() const { return std::isfinite(max) && max < tol; }
  [[nodiscard]] std::string line() const {
    return "CHECK " + name + (pass() ? " PASS" : " FAIL") + " max=" + fmt_short(max) + " tol=" + fmt_short(tol);
  }
};

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace detail {

/// Worst value of fn over n seeded draws.
template <typename Draw, typename Fn>
double worst(int n, std::uint64_t seed, Draw draw, Fn fn) {
  Sampler sampler(seed);
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = fn(draw(sampler));
    if (!std::isfinite(v)) {
      return v;
    }
    m = std::max(m, v);
  }
  return m;
}

inline std::vector<CheckResult> structural_checks(const ScenarioFile& sc, int n, std::uint64_t seed) {
  const DeformationProfile& prof = sc.profile;
  AdmissibleDomain dom{sc.box, is_rotational(sc.kind) ? 0.1 : 0.0};
  auto draw = [&](Sampler& s) { return dom.sample(s); };
  std::vector<CheckResult> out;
  out.push_back({"inversion", worst(n, seed + 1, draw, [&](const PhasePoint& x) {
                   return pair_identity_defect(prof, x);
                 }),
                 1e-10});
  if (is_rotational(sc.kind)) {
    out.push_back({"closure", worst(n, seed + 2, draw, [&](const PhasePoint& x) {
                     return max_abs(closure_residual_rotational(prof, x));
                   }),
                   1e-6});
  }
  out.push_back({"jacobi", worst(n, seed + 3, draw, [&](const PhasePoint& x) {
                   return max_jacobi_residual(prof, x);
                 }),
                 1e-6});
  out.push_back({"d-omega", worst(n, seed + 4, draw, [&](const PhasePoint& x) {
                   return d_omega_residual(prof, x);
                 }),
                 1e-6});
  return out;
}

inline std::vector<CheckResult> group_checks(const ScenarioFile& sc, int n, std::uint64_t seed) {
  const DeformationProfile& prof = sc.profile;
  const int d = sc.dim;
  std::vector<CheckResult> out;
  std::vector<group::LieGenerator> gens;
  if (d == 2) {
    gens.push_back(group::so2_generator());
  } else {
    for (int i = 0; i < 3; ++i) {
      gens.push_back(group::so3_generator(i));
    }
  }
  AdmissibleDomain dom{sc.box, 0.1};
  out.push_back({"momentum-map", worst(n, seed + 5, [&](Sampler& s) { return dom.sample(s); },
                                       [&](const PhasePoint& x) {
                                         double m = 0.0;
                                         for (const auto& g : gens) {
                                           m = std::max(m, group::hamiltonian_action_residual(prof, g, x));
                                         }
                                         return m;
                                       }),
                 1e-8});

  const Chart chart = group::constraint_chart(d);
  auto draw_u = [d](Sampler& s) {
    Vector u(d == 2 ? 3 : 4);
    u(0) = s.uniform(0.2, 2.0);
    u(1) = 0.25 * std::floor(s.uniform(0.0, 9.0));
    u(2) = d == 2 ? s.uniform(0.0, 2.0 * std::numbers::pi) : s.uniform(0.1, std::numbers::pi - 0.1);
    if (d == 3) {
      u(3) = s.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return u;
  };
  out.push_back({"momentum-on-chart", worst(n, seed + 6, draw_u, [&](const Vector& u) {
                   return max_abs(prof.angular_momentum(PhasePoint(chart.map(u))));
                 }),
                 1e-10});
  out.push_back({"reduced-form-leak", worst(n, seed + 7, draw_u, [&](const Vector& u) {
                   return group::reduced_form_report(prof, chart, u).leak;
                 }),
                 1e-9});
  out.push_back({"reduced-form-coefficient", worst(n, seed + 7, draw_u, [&](const Vector& u) {
                   const double w = group::reduced_form_report(prof, chart, u).w;
                   return std::abs(w + 1.0 / prof.f(PhasePoint(chart.map(u))));
                 }),
                 1e-9});
  if (d == 3) {
    out.push_back({"rank-dmu-constraint", worst(n, seed + 8, draw_u, [&](const Vector& u) {
                     return std::abs(group::rank_dmu_3d(PhasePoint(chart.map(u))) - 2.0);
                   }),
                   0.5});
    out.push_back({"rank-dmu-generic", worst(n, seed + 9, [&](Sampler& s) { return dom.sample(s); },
                                             [&](const PhasePoint& x) {
                                               return std::abs(group::rank_dmu_3d(x) - 3.0);
                                             }),
                   0.5});
  } else {
    out.push_back({"sign-chart-overlap", worst(n, seed + 10, [](Sampler& s) {
                     const double r = s.uniform(0.2, 2.0);
                     const double th = s.uniform(0.1, std::numbers::pi / 2 - 0.1) + std::numbers::pi / 2 *
                                                                                       std::floor(s.uniform(0.0, 4.0));
                     const double alpha = s.uniform(-2.0, 2.0);
                     Vector x(4);
                     x << r * std::cos(th), r * std::sin(th), alpha * r * std::cos(th), alpha * r * std::sin(th);
                     return PhasePoint(x);
                   },
                                               [](const PhasePoint& x) {
                                                 const auto a = group::sign_chart_coords(x, group::SignChart::q1_nonzero);
                                                 const auto b = group::sign_chart_coords(x, group::SignChart::q2_nonzero);
                                                 return std::max(std::abs(a.first - b.first),
                                                                 std::abs(a.second - b.second));
                                               }),
                   1e-12});
  }
  return out;
}

inline std::vector<CheckResult> hamiltonian_checks(const ScenarioFile& sc, int n, std::uint64_t seed) {
  const DeformationProfile& prof = sc.profile;
  const ScalarField& V = sc.V;
  std::vector<CheckResult> out;
  const cosmo::FlatCoordinateReport flat = cosmo::flat_coordinate_check(prof, n, seed + 11);
  out.push_back({"flat-coordinates" + (flat.pass ? std::string() : " worst=" + flat.worst), flat.max, 1e-10});

  auto draw_x = [&](Sampler& s) { return PhasePoint(s.uniform(sc.box)); };
  out.push_back({"xh-explicit-vs-generic", worst(n, seed + 12, draw_x, [&](const PhasePoint& x) {
                   const Vector generic = hamiltonian_vector_field(prof, cosmo::bianchi_dH(x, V), x);
                   return max_abs(generic - cosmo::bianchi_Xh(prof, x, V));
                 }),
                 1e-9});
  out.push_back({"xh-tangency", worst(n, seed + 13, draw_x, [&](const PhasePoint& x) {
                   const Vector X = hamiltonian_vector_field(prof, cosmo::bianchi_dH(x, V), x);
                   return std::abs(cosmo::bianchi_dH(x, V).dot(X));
                 }),
                 1e-9});

  cosmo::BianchiScenario bs;
  bs.profile = prof;
  bs.potential = V;
  auto draw_r = [&](Sampler& s) { return cosmo::sample_reduced(bs, s); };
  out.push_back({"branch-lift", worst(n, seed + 14, draw_r, [&](const cosmo::ReducedState& st) {
                   return std::abs(cosmo::bianchi_H(cosmo::embed(st.t, st.s, V), V));
                 }),
                 1e-12});
  out.push_back({"omega-N", worst(n, seed + 15, draw_r, [&](const cosmo::ReducedState& st) {
                   return max_abs(cosmo::pulled_back_omega_N(prof, st.s, V).entries -
                                  cosmo::reduced_omega_N(prof, st.s, V).entries);
                 }),
                 1e-8});
  const TwoFormField wN = [&](const Vector& s) { return cosmo::pulled_back_omega_N(prof, s, V).entries; };
  out.push_back({"d-omega-N", worst(n, seed + 16, draw_r, [&](const cosmo::ReducedState& st) {
                   return exterior_derivative_two_form(wN, st.s, FdOptions::exterior());
                 }),
                 1e-6});
  out.push_back({"lie-derivative", worst(n, seed + 17, draw_r, [&](const cosmo::ReducedState& st) {
                   return cosmo::lie_derivative_residual(st.t, prof, V, st.s);
                 }),
                 1e-7});
  out.push_back({"hamiltonian-recovery", worst(n, seed + 18, draw_r, [&](const cosmo::ReducedState& st) {
                   return max_abs(cosmo::reduced_hamiltonian_field(st.t, st.s, prof, V) -
                                  cosmo::projected_Xt(st.t, st.s, prof, V));
                 }),
                 1e-8});
  return out;
}

}  // namespace detail

/// Runs every applicable certificate and returns them in report order.
inline std::vector<CheckResult> verification_suite(const ScenarioFile& sc, int samples, std::uint64_t seed) {
  std::vector<CheckResult> out = detail::structural_checks(sc, samples, seed);
  std::vector<CheckResult> extra;
  switch (sc.constraint) {
    case ConstraintKind::so2:
    case ConstraintKind::so3: extra = detail::group_checks(sc, samples, seed); break;
    case ConstraintKind::hamiltonian: extra = detail::hamiltonian_checks(sc, samples, seed); break;
    case ConstraintKind::none: break;
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

inline int cmd_verify(const ScenarioFile& sc, const RunOptions& opt, std::ostream& out) {
  const int samples = opt.samples.value_or(200);
  if (samples < 1) {
    throw ConfigError("--samples must be at least 1");
  }
  const std::uint64_t seed = opt.seed.value_or(sc.seed);
  out << "SCENARIO " << sc.name << " kind=" << to_string(sc.kind) << " constraint=" << to_string(sc.constraint)
      << " samples=" << samples << " seed=" << seed << '\n';
  int failed = 0;
  const auto checks = verification_suite(sc, samples, seed);
  for (const auto& c : checks) {
    out << c.line() << '\n';
    failed += c.pass() ? 0 : 1;
  }
  out << "SUMMARY passed=" << checks.size() - failed << " failed=" << failed << '\n';
  out.flush();
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

/// Parses `a:b:n` entries, comma separated, optionally prefixed by `name=`.
/// Unnamed entries bind to the parameters in order.
inline std::vector<GridAxis> parse_grid(const std::string& spec, const std::vector<std::string>& params,
                                        const std::vector<double>& defaults) {
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < params.size(); ++i) {
    axes.push_back({params[i], {defaults[i]}});
  }
  std::vector<bool> set(params.size(), false);
  std::size_t position = 0;
  std::size_t start = 0;
  while (start <= spec.size() && !spec.empty()) {
    const auto comma = spec.find(',', start);
    std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    start = comma == std::string::npos ? spec.size() + 1 : comma + 1;
    std::size_t index = position;
    if (const auto eq = item.find('='); eq != std::string::npos) {
      const std::string name(config::detail::trim(item.substr(0, eq)));
      item = item.substr(eq + 1);
      index = params.size();
      for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k] == name) {
          index = k;
        }
      }
      if (index == params.size()) {
        throw ConfigError("grid names unknown parameter '" + name + "'");
      }
    } else {
      ++position;
    }
    if (index >= params.size()) {
      throw ConfigError("grid has more entries than parameters");
    }
    if (set[index]) {
      throw ConfigError("grid sets parameter '" + params[index] + "' twice");
    }
    set[index] = true;
    double a = 0.0, b = 0.0, count = 0.0;
    const auto c1 = item.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : item.find(':', c1 + 1);
    if (c2 == std::string::npos || !config::detail::parse_number(item.substr(0, c1), a) ||
        !config::detail::parse_number(item.substr(c1 + 1, c2 - c1 - 1), b) ||
        !config::detail::parse_number(item.substr(c2 + 1), count) || count < 1 || count != std::floor(count)) {
      throw ConfigError("grid entry '" + item + "' is not of the form a:b:n");
    }
    const int m = static_cast<int>(count);
    auto& values = axes[index].values;
    values.clear();
    for (int k = 0; k < m; ++k) {
      values.push_back(m == 1 ? a : a + (b - a) * k / (m - 1));
    }
  }
  return axes;
}

namespace detail {

/// Cartesian product, first axis slowest.
inline void for_each_point(const std::vector<GridAxis>& axes, const std::function<void(const Vector&)>& fn) {
  Vector u(static_cast<Eigen::Index>(axes.size()));
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == axes.size()) {
      fn(u);
      return;
    }
    for (double v : axes[k].values) {
      u(static_cast<Eigen::Index>(k)) = v;
      rec(k + 1);
    }
  };
  rec(0);
}

inline void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    out << (i ? "," : "") << fmt17(row[i]);
  }
  out << '\n';
}

inline void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << '\n';
}

}  // namespace detail

inline int cmd_reduce(const ScenarioFile& sc, const RunOptions& opt, std::ostream& out) {
  if (sc.constraint == ConstraintKind::none) {
    throw ConfigError(sc.source + ": reduce needs a constraint (so2, so3 or hamiltonian)");
  }
  const std::string spec = opt.grid.value_or(sc.grid.value_or(""));
  if (sc.constraint == ConstraintKind::hamiltonian) {
    const std::vector<std::string> params{"q1", "q2", "p1", "p2"};
    const auto axes = parse_grid(spec.empty() ? "p1=0:1:5" : spec, params, {0.0, 0.0, 0.3, 0.4});
    std::vector<std::string> cols = params;
    cols.push_back("H_0");
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        cols.push_back("omega_" + params[a] + "_" + params[b]);
      }
    }
    detail::write_header(out, cols);
    detail::for_each_point(axes, [&](const Vector& s) {
      const Matrix w = cosmo::pulled_back_omega_N(sc.profile, s, sc.V).entries;
      std::vector<double> row(s.data(), s.data() + s.size());
      row.push_back(cosmo::reduced_H(0.0, s, sc.V));
      for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
          row.push_back(w(a, b));
        }
      }
      detail::write_row(out, row);
    });
    out.flush();
    return kExitOk;
  }
  const Chart chart = group::constraint_chart(sc.dim);
  const std::vector<double> defaults =
      sc.dim == 2 ? std::vector<double>{1.0, 0.0, 0.7} : std::vector<double>{1.0, 0.0, 0.7, 0.3};
  const auto axes = parse_grid(spec.empty() ? "rho=0:2:9" : spec, chart.param_names, defaults);
  std::vector<std::string> cols = chart.param_names;
  cols.push_back("w_coefficient");
  cols.push_back("leak_max");
  detail::write_header(out, cols);
  detail::for_each_point(axes, [&](const Vector& u) {
    const group::ReducedForm rf = group::reduced_form_report(sc.profile, chart, u);
    std::vector<double> row(u.data(), u.data() + u.size());
    row.push_back(rf.w);
    row.push_back(rf.leak);
    detail::write_row(out, row);
  });
  out.flush();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

inline int cmd_evolve(const ScenarioFile& sc, const RunOptions&, std::ostream& out, std::ostream& err) {
  const int m = sc.state_size();
  const auto& ig = sc.integrator;
  const DeformationProfile& prof = sc.profile;

  dyn::TimeField field;
  TwoFormField omega;
  std::function<double(double, const Vector&)> energy;
  std::string energy_name;
  if (sc.is_bianchi()) {
    field = [&](double t, const Vector& s) { return cosmo::projected_Xt(t, s, prof, sc.V); };
    omega = [&](const Vector& s) { return cosmo::pulled_back_omega_N(prof, s, sc.V).entries; };
    energy = [&](double t, const Vector& s) { return cosmo::reduced_H(t, s, sc.V); };
    energy_name = "H_t";
  } else {
    field = dyn::hamiltonian_flow(prof, sc.H);
    omega = [&](const Vector& x) { return omega_lower(prof, PhasePoint(x)).entries; };
    energy = [&](double, const Vector& x) { return sc.H(x); };
    energy_name = "H";
  }

  std::vector<std::string> cols{"t"};
  for (const auto& n : sc.state_names()) {
    cols.push_back(n);
  }
  cols.push_back(energy_name);
  const bool has_j = sc.constraint == ConstraintKind::so2 || sc.constraint == ConstraintKind::so3;
  const bool has_gauss = sc.constraint == ConstraintKind::so3;
  if (sc.constraint == ConstraintKind::so2) {
    cols.push_back("J");
  } else if (has_gauss) {
    cols.insert(cols.end(), {"J1", "J2", "J3", "gauss_drift"});
  }
  cols.push_back("symplecticity_defect");
  detail::write_header(out, cols);

  const double eps = 1e-6;
  const Vector d1 = sc.delta1.value_or(Vector::Unit(m, 0));
  const Vector d2 = sc.delta2.value_or(Vector::Unit(m, m / 2));
  Vector x = sc.initial;
  Vector xa = x + eps * d1;
  Vector xb = x + eps * d2;
  const double h = (ig.t1 - ig.t0) / ig.steps;

  auto gauss = [](const Vector& y) -> Eigen::Vector3d {
    const Eigen::Vector3d q = y.head(3);
    const Eigen::Vector3d p = y.tail(3);
    return q.cross(p);
  };
  const Eigen::Vector3d gauss0 = has_gauss ? gauss(x) : Eigen::Vector3d::Zero();
  const double s0 = ((xa - x) / eps).dot(omega(x) * ((xb - x) / eps));
  const double scale = std::abs(s0) > 0.0 ? std::abs(s0) : 1.0;

  auto emit = [&](double t) {
    std::vector<double> row{t};
    row.insert(row.end(), x.data(), x.data() + x.size());
    row.push_back(energy(t, x));
    if (has_j) {
      const Vector j = prof.angular_momentum(PhasePoint(x));
      row.insert(row.end(), j.data(), j.data() + j.size());
    }
    if (has_gauss) {
      row.push_back((gauss(x) - gauss0).cwiseAbs().maxCoeff());
    }
    const double s = ((xa - x) / eps).dot(omega(x) * ((xb - x) / eps));
    row.push_back(std::abs(s - s0) / scale);
    detail::write_row(out, row);
  };

  try {
    emit(ig.t0);
    for (int n = 0; n < ig.steps; ++n) {
      const double t = ig.t0 + n * h;
      const Vector nx = dyn::step(field, t, x, h, ig.method);
      const Vector na = dyn::step(field, t, xa, h, ig.method);
      const Vector nb = dyn::step(field, t, xb, h, ig.method);
      x = nx;
      xa = na;
      xb = nb;
      emit(n + 1 == ig.steps ? ig.t1 : ig.t0 + (n + 1) * h);
    }
  } catch (const Error& e) {
    out.flush();
    err << "gupred: integration stopped: " << e.what() << '\n';
    return kExitRuntime;
  }
  out.flush();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Loads the scenario, runs the command and maps failures onto exit codes.
inline int run_command(const std::string& command, const std::string& path, const RunOptions& opt, std::ostream& out,
                       std::ostream& err) {
  try {
    if (command != "verify" && command != "reduce" && command != "evolve") {
      throw ConfigError("unknown command '" + command + "' (expected verify, reduce or evolve)");
    }
    const ScenarioFile sc = load_scenario(path);
    std::ofstream file;
    std::ostream* sink = &out;
    if (opt.out) {
      file.open(*opt.out, std::ios::binary | std::ios::trunc);
      if (!file) {
        throw ConfigError("cannot write '" + *opt.out + "'");
      }
      sink = &file;
    }
    if (command == "verify") {
      return cmd_verify(sc, opt, *sink);
    }
    if (command == "reduce") {
      return cmd_reduce(sc, opt, *sink);
    }
    return cmd_evolve(sc, opt, *sink, err);
  } catch (const ConfigError& e) {
    err << "gupred: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dsl::ParseError& e) {
    err << "gupred: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dsl::UnknownIdentifier& e) {
    err << "gupred: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "gupred: runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace gupred::cli
