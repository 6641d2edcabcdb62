#pragma once

#include "isop/experiment.hpp"
#include "isop/search.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace isop {

/// Recomputes the value of one instance (a polytope and/or parameters).
using InstanceEval = std::function<Estimate(const Experiment&, const std::optional<Polytope>&, const Json&)>;

struct Protocol {
  std::string id;
  std::string objective;
  std::string constraint;
  std::string spaces;  ///< allowed geometry tags, e.g. "EH"
  std::string claim;
  Relation relation = Relation::ge;
  std::function<Report(const Experiment&, const Protocol&)> run;
  InstanceEval evaluate;  ///< empty for purely closed-form protocols
};

namespace proto {

inline Report base_report(const Experiment& e, const Protocol& p) {
  Report r;
  r.id = e.id;
  r.geometry = std::string(1, space_tag(e.geometry.space));
  r.d = e.geometry.dim;
  r.objective = e.objective;
  r.constraint = e.constraint;
  r.claim = p.claim;
  r.relation = p.relation;
  r.tolerance = e.tol;
  r.trials = e.trials;
  r.seed = e.seed;
  r.samples = e.samples;
  r.config_hash = git_blob_sha1(e.source);
  return r;
}

inline Rng trial_rng(const Experiment& e, int t) { return make_rng(e.seed, 0x10000ull + static_cast<std::uint64_t>(t)); }

inline Json instance(const std::optional<Polytope>& P, Json params) {
  Json j = Json::object();
  if (P) j["polytope"] = polytope_to_json(*P);
  j["params"] = std::move(params);
  return j;
}

/// Result of one trial. `ok` is false when the trial produced no instance.
struct Trial {
  bool ok = false;
  double value = 0;
  double sigma = 0;
  std::optional<Polytope> polytope;
  Json params = Json::object();
  Json extra = Json::object();
};

inline std::vector<Trial> run_trials(const Experiment& e, int n, const std::function<Trial(int)>& f) {
  std::vector<Trial> out(n);
  parallel_for(n, e.jobs, [&](int t) { out[t] = f(t); });
  return out;
}

/// Fills best/evaluated/counterexample from trials and returns the worst
/// index. Monte Carlo trials carry their own allowance of 3 combined
/// standard errors; the worst trial is the one with the least slack after
/// it, and its allowance is added to the tolerance.
inline int summarize(Report& r, const std::vector<Trial>& ts, double bench, double bench_sigma = 0) {
  r.benchmark = bench;
  r.evaluated = 0;
  auto allowance = [&](const Trial& t) { return 3 * std::hypot(t.sigma, bench_sigma); };
  int w = -1;
  double worst_slack = 0;
  for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
    if (!ts[i].ok) continue;
    ++r.evaluated;
    const double slack = relation_margin(r.relation, ts[i].value, bench) + allowance(ts[i]);
    if (w < 0 || slack < worst_slack) {
      w = i;
      worst_slack = slack;
    }
  }
  require(w >= 0, Errc::infeasible, "no trial produced a feasible instance");
  r.best = ts[w].value;
  const double allow = allowance(ts[w]);
  if (allow > 0) {
    r.tolerance += allow;
    r.details["worst_trial_std_error"] = ts[w].sigma;
    r.details["benchmark_std_error"] = bench_sigma;
  }
  r.counterexample = Counterexample{instance(ts[w].polytope, ts[w].params), ts[w].value, bench};
  return w;
}

inline Estimate volume_of(const Experiment& e, const Polytope& P, std::uint64_t stream) {
  return polytope_volume(P, VolumeMethod::automatic, e.mc(stream));
}

inline std::uint64_t stream_of(const Json& params) {
  return params.contains("stream") ? params["stream"].get<std::uint64_t>() : 0;
}

inline const Polytope& need_polytope(const std::optional<Polytope>& P) {
  require(P.has_value(), Errc::invalid_input, "instance needs a polytope");
  return *P;
}

inline Ball centred_ball(Geometry g, double r) { return Ball{basepoint(g), r}; }

// ---------------------------------------------------------------- closed forms

inline Report g4_tie(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const double a = g_d(4, 1), b = g_d(4, 2);
  r.best = std::max(std::abs(a - 48.0), std::abs(b - 48.0)) / 48.0;
  r.benchmark = 0;
  r.trials = r.evaluated = 1;
  r.details = Json{{"g4(1)", a}, {"g4(2)", b}, {"euvolir_bound(4)", euvolir_bound(4)}};
  return r;
}

inline Report closed_forms(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const int dmax = e.integer("d_max", 10);
  double worst = 0, worst_slope = 0;
  int checked = 0;
  for (int d = 2; d <= dmax; ++d)
    for (int k = 1; k < d; ++k) {
      const double ts = t_star(d, k);
      const double fk = f_k(d, k, ts), gk = g_d(d, k);
      worst = std::max(worst, std::abs(fk - gk) / gk);
      const double h = 1e-5;
      worst_slope = std::max(worst_slope, std::abs(f_k(d, k, ts + h) - f_k(d, k, ts - h)) / (2 * h * fk));
      ++checked;
    }
  const double b2 = std::abs(euvolir_bound(2) - 4.0) / 4.0;
  r.best = std::max(worst, b2);
  r.benchmark = 0;
  r.trials = r.evaluated = checked + 1;
  r.details = Json{{"max_rel_error_fk_tstar_vs_gd", worst},
                   {"euvolir_bound(2)", euvolir_bound(2)},
                   {"max_rel_slope_at_tstar", worst_slope},
                   {"pairs_checked", checked}};
  return r;
}

inline Estimate euvol_eval(const Experiment&, const std::optional<Polytope>& P, const Json& q) {
  const int d = q.at("d"), k = q.at("k");
  const double r1 = q.at("r1"), r2 = q.at("r2");
  const double printed = euvol_closed_form(d, k, r1, r2);
  return {polytope_volume(need_polytope(P), VolumeMethod::exact).value / printed, 0.0};
}

inline Report euvol(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const int dmax = e.integer("d_max", 6);
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    const int d = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(dmax - 1));
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d - 1));
    const double r1 = uniform(rng, 0.5, 2.0), r2 = uniform(rng, 0.5, 2.0);
    Trial tr;
    tr.polytope = orthogonal_join(Geometry::euclidean(d), k, r1, r2);
    tr.params = Json{{"d", d}, {"k", k}, {"r1", r1}, {"r2", r2}};
    tr.value = euvol_eval(e, tr.polytope, tr.params).value;
    const double vol = tr.value * euvol_closed_form(d, k, r1, r2);
    tr.extra = Json{{"corrected_rel_error", std::abs(vol / join_volume(d, k, r1, r2) - 1.0)}};
    tr.ok = true;
    return tr;
  });
  summarize(r, ts, 1.0);
  double corr = 0, planar = 0;
  int mismatched = 0, spatial = 0;
  for (const auto& t : ts) {
    corr = std::max(corr, t.extra["corrected_rel_error"].get<double>());
    const int d = t.params["d"];
    if (d == 2) {
      planar = std::max(planar, std::abs(t.value - 1.0));
    } else {
      ++spatial;
      if (std::abs(t.value - 1.0) > e.tol) ++mismatched;
    }
  }
  r.details = Json{{"max_rel_error_corrected_formula", corr},
                   {"max_rel_error_printed_d2", planar},
                   {"instances_d_ge_3", spatial},
                   {"printed_mismatches_d_ge_3", mismatched}};
  r.note = "Value is triangulated volume / printed closed form. The printed formula agrees only for d = 2; "
           "the Gram-determinant form (join_volume) matches every instance.";
  return r;
}

inline Estimate inball_eval(const Experiment&, const std::optional<Polytope>& P, const Json&) {
  return {inball(need_polytope(P)).radius, 0.0};
}

inline Report inball_identity(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  std::vector<Json> cases;
  for (double dd : e.list("dims", {3, 4, 5}))
    for (int k = 1; k < static_cast<int>(dd); ++k)
      for (double t : e.list("t_values", {-1.5, -0.5, 0.0, 0.7, 2.0}))
        cases.push_back(Json{{"d", static_cast<int>(dd)}, {"k", k}, {"t", t}});
  const auto ts = run_trials(e, static_cast<int>(cases.size()), [&](int i) {
    Trial tr;
    tr.params = cases[i];
    tr.polytope = unit_inball_join(cases[i]["d"], cases[i]["k"], cases[i]["t"]);
    tr.value = inball_eval(e, tr.polytope, tr.params).value;
    tr.ok = true;
    return tr;
  });
  r.trials = static_cast<int>(cases.size());
  summarize(r, ts, 1.0);
  double worst_centre = 0;
  for (const auto& t : ts) worst_centre = std::max(worst_centre, inball(*t.polytope).center.coords().norm());
  r.details = Json{{"cases", cases.size()}, {"max_centre_offset", worst_centre}};
  return r;
}

inline Estimate ratio_eval(const Experiment&, const std::optional<Polytope>& P, const Json&) {
  return {ratio_gap(need_polytope(P)), 0.0};
}

inline Report ratio(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const Geometry g = e.geometry;
  const double radius = e.num("radius", 1.0);
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    for (int attempt = 0; attempt < 1000 && !tr.ok; ++attempt) {
      try {
        tr.polytope = Polytope::from_vertices(random_points(rng, g, g.dim + 1, radius));
        tr.value = ratio_eval(e, tr.polytope, tr.params).value;
        tr.ok = true;
      } catch (const Error&) {
      }
    }
    return tr;
  });
  summarize(r, ts, 0.0);
  double reg = 0;
  Json regs = Json::array();
  for (double rr : e.list("regular_inradii", {0.1, 0.3})) {
    const double gap = ratio_gap(regular_simplex(g, RegularBy::inradius, rr));
    regs.push_back(Json{{"inradius", rr}, {"gap", gap}});
    reg = std::max(reg, std::abs(gap));
  }
  r.details["regular"] = regs;
  r.details["min_random_gap"] = r.best;
  // a regular simplex off the equality case counts as a violation too
  if (-reg < r.best) {
    r.best = -reg;
    r.counterexample.reset();
  }
  return r;
}

// ------------------------------------------------------------ inscribed volume

inline Estimate volume_eval(const Experiment& e, const std::optional<Polytope>& P, const Json& q) {
  return volume_of(e, need_polytope(P), stream_of(q));
}

inline Report inscribedvol(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const Geometry g = e.geometry;
  const double R = e.num("radius", 1.0);
  const Ball B = centred_ball(g, R);
  const std::uint64_t bench_samples = e.samples * 8;
  // benchmark: best orthogonal join inscribed in B
  double bench = 0, bench_sigma = 0;
  int bench_k = 0;
  Json joins = Json::array();
  for (int k = 1; k <= g.dim / 2; ++k) {
    const Estimate v = polytope_volume(inscribed_join(g, k, R), VolumeMethod::automatic, e.mc(999, bench_samples));
    joins.push_back(Json{{"k", k}, {"volume", v.value}, {"std_error", v.std_error}});
    if (v.value > bench) {
      bench = v.value;
      bench_sigma = v.std_error;
      bench_k = k;
    }
  }
  DescentOptions opt;
  opt.direction = Direction::maximize;
  opt.constraint = {ConstraintKind::inscribed, B};
  const bool descent = descent_supported(g, opt);
  const int iters = e.integer("search_iterations", 150);
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    tr.params = Json{{"stream", 1000 + t}};
    for (int attempt = 0; attempt < 100 && !tr.ok; ++attempt) {
      try {
        const Polytope P0 = Polytope::from_vertices(random_on_ball_boundary(rng, B, g.dim + 2));
        DescentOptions o = opt;
        o.objective.mc = e.mc(1000 + t);
        if (descent) {
          const DescentResult res = symmetrization_descent(P0, o);
          tr.polytope = res.polytope;
          tr.extra = Json{{"steps", res.edges.size()}, {"asymmetry", bisector_asymmetry(res.polytope)}};
        } else {
          auto val = [&](const Polytope& P) { return volume_of(e, P, 1000 + t).value; };
          auto inside = [&](const Polytope& P) {
            for (const auto& v : P.vertices())
              if (distance(B.center, v) > R + 1e-12) return false;
            return true;
          };
          RandomSearchOptions rs;
          rs.iterations = iters;
          tr.polytope = random_search(P0, val, inside, Direction::maximize, rng, rs).polytope;
        }
        const Estimate v = volume_eval(e, tr.polytope, tr.params);
        tr.value = v.value;
        tr.sigma = v.std_error;
        tr.ok = true;
      } catch (const Error&) {
      }
    }
    return tr;
  });
  summarize(r, ts, bench, bench_sigma);
  const double sigma = std::hypot(r.details.value("worst_trial_std_error", 0.0), bench_sigma);
  double asym = 0;
  int near = 0;
  for (const auto& t : ts) {
    if (t.extra.contains("asymmetry")) asym = std::max(asym, t.extra["asymmetry"].get<double>());
    if (t.ok && std::abs(t.value - bench) <= 1e-6 * bench + 3 * sigma) ++near;
  }
  r.details["method"] = descent ? "symmetrization descent" : "random search";
  r.details["joins"] = joins;
  r.details["best_k"] = bench_k;
  r.details["trials_reaching_benchmark"] = near;
  if (descent) r.details["max_fixed_point_asymmetry"] = asym;
  return r;
}

// ------------------------------------------------------ circumscribed volume

inline Report circumscribed_simplex(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const Geometry g = e.geometry;
  const double rad = e.num("radius", 0.4);
  const Ball B = centred_ball(g, rad);
  const Polytope reg = regular_simplex(g, RegularBy::inradius, rad);
  const Estimate vreg = polytope_volume(reg, VolumeMethod::automatic, e.mc(999, e.samples * 8));
  const double touch = e.num("touch", 1.0), slack = e.num("slack", 0.0);
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    tr.params = Json{{"stream", 1000 + t}};
    tr.polytope = random_simplex_containing(rng, B, touch, slack);
    const Estimate v = volume_eval(e, tr.polytope, tr.params);
    tr.value = v.value;
    tr.sigma = v.std_error;
    tr.ok = true;
    return tr;
  });
  summarize(r, ts, vreg.value, vreg.std_error);
  r.details["regular_volume"] = vreg.value;
  return r;
}

inline Estimate volume_per_inradius_eval(const Experiment&, const std::optional<Polytope>& P, const Json&) {
  const Polytope& Q = need_polytope(P);
  return {polytope_volume(Q, VolumeMethod::exact).value / std::pow(inball(Q).radius, Q.dim()), 0.0};
}

/// Smallest volume of an orthogonal join or a regular simplex with unit
/// inradius, from the Gram-determinant volume at t* = ln((d-k)/k).
inline double min_unit_inradius_volume(int d, int* best_k = nullptr) {
  double best = regular_simplex_unit_inradius_volume(d);
  if (best_k) *best_k = 0;
  for (int k = 1; k < d; ++k) {
    const double t = t_star(d, k);
    const double v = join_volume(d, k, std::sqrt(1.0 + std::exp(t)), std::sqrt(1.0 + std::exp(-t)));
    if (v < best) {
      best = v;
      if (best_k) *best_k = k;
    }
  }
  return best;
}

inline Report circumscribed_polytope(const Experiment& e, const Protocol& p, bool printed) {
  Report r = base_report(e, p);
  const Geometry g = e.geometry;
  const int d = g.dim;
  int best_k = 0;
  const double corrected = min_unit_inradius_volume(d, &best_k);
  const double bench = printed ? euvolir_bound(d) : corrected;
  DescentOptions opt;
  opt.direction = Direction::minimize;
  opt.constraint = {ConstraintKind::circumscribed, centred_ball(g, 1.0)};
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    for (int attempt = 0; attempt < 1000 && !tr.ok; ++attempt) {
      try {
        const Polytope P0 = Polytope::from_vertices(random_points(rng, g, d + 2, 1.0));
        const DescentResult res = symmetrization_descent(P0, opt);
        tr.polytope = res.polytope;
        tr.value = volume_per_inradius_eval(e, tr.polytope, tr.params).value;
        tr.extra = Json{{"start", res.history.front()}};
        tr.ok = true;
      } catch (const Error&) {
      }
    }
    return tr;
  });
  summarize(r, ts, bench);
  r.details["corrected_minimum"] = corrected;
  r.details["corrected_minimizer"] = best_k == 0 ? "regular simplex" : "join k=" + std::to_string(best_k);
  r.details["printed_bound"] = euvolir_bound(d);
  r.details["best_vs_corrected_gap"] = r.best - corrected;
  return r;
}

// ------------------------------------------------------------------ moment

inline std::vector<Point> regular_sphere_points(int n) {
  const Geometry s2 = Geometry::spherical(2);
  std::vector<Vec> raw;
  if (n == 4) {
    const Mat U = unit_regular_simplex(3);
    for (int i = 0; i < 4; ++i) raw.push_back(U.col(i));
  } else if (n == 6) {
    for (int i = 0; i < 3; ++i)
      for (double s : {1.0, -1.0}) {
        Vec v = Vec::Zero(3);
        v[i] = s;
        raw.push_back(v);
      }
  } else if (n == 12) {
    const double phi = 0.5 * (1 + std::sqrt(5.0));
    for (double a : {1.0, -1.0})
      for (double b : {phi, -phi}) {
        Vec x(3), y(3), z(3);
        x << 0, a, b;
        y << a, b, 0;
        z << b, 0, a;
        raw.push_back(x);
        raw.push_back(y);
        raw.push_back(z);
      }
  } else {
    throw Error(Errc::invalid_input, "regular configurations exist for 4, 6 or 12 points");
  }
  std::vector<Point> out;
  for (auto& v : raw) out.push_back(Point::projected(s2, v));
  return out;
}

inline Estimate moment_eval(const Experiment& e, const std::optional<Polytope>&, const Json& q) {
  const Geometry s2 = Geometry::spherical(2);
  std::vector<Point> pts;
  for (const auto& row : q.at("points")) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = row[i].get<double>();
    pts.push_back(Point(s2, x));
  }
  const double alpha = e.num("alpha", 1.0);
  return {sphere_voronoi_moment(pts, [alpha](double tau) { return std::pow(tau, alpha); }), 0.0};
}

inline Json points_json(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(Json{p[0], p[1], p[2]});
  return a;
}

inline Report moment(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const int n = e.integer("points", 4);
  const double sigma = e.num("sigma", 0.05);
  const auto reg = regular_sphere_points(n);
  const double m0 = moment_eval(e, std::nullopt, Json{{"points", points_json(reg)}}).value;
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    std::vector<Point> pts;
    for (const auto& x : reg) {
      const Isometry T = to_basepoint(x).inverse();
      pts.push_back(T.apply(exp_base(x.geometry(), sigma * uniform01(rng) * random_unit(rng, 2))));
    }
    tr.params = Json{{"points", points_json(pts)}};
    try {
      tr.value = moment_eval(e, std::nullopt, tr.params).value;
      tr.ok = true;
    } catch (const Error&) {
    }
    return tr;
  });
  summarize(r, ts, m0);
  r.details["regular_moment"] = m0;
  r.details["closest_perturbation_excess"] = r.best - m0;
  return r;
}

// -------------------------------------------------------- spherical TEL

inline Report tel_spherical_i(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const int d = e.geometry.dim;
  const double rad = e.num("radius", 1.4), eps = e.num("eps", 0.01);
  double x = 0;
  const Polytope spike = spike_containing_ball(d, eps, rad, &x);
  const Ball B = centred_ball(e.geometry, rad);
  r.best = total_edge_length(spike);
  r.benchmark = spherical_regular_TEL(rad, d);
  r.trials = r.evaluated = 1;
  const double constructed = total_edge_length(regular_simplex(e.geometry, RegularBy::inradius, rad));
  r.details = Json{{"spike_x", x},
                   {"spike_contains_ball", contains_ball(spike, B, 1e-9)},
                   {"d_pi_plus_eps", d * std::numbers::pi + eps},
                   {"regular_TEL_constructed", constructed},
                   {"regular_TEL_closed_form_error", std::abs(constructed - r.benchmark)}};
  if (!contains_ball(spike, B, 1e-9)) r.best = std::numeric_limits<double>::infinity();
  return r;
}

inline Report tel_spherical_ii(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const double rad = e.num("radius", 0.3), eps = e.num("eps", 0.01);
  const int dmax = e.integer("d_max", 40);
  int dstar = -1;
  for (int d = 2; d <= dmax && dstar < 0; ++d)
    if (spherical_regular_TEL(rad, d) > d * std::numbers::pi + eps) dstar = d;
  require(dstar > 0, Errc::infeasible, "regular TEL stays below d pi + eps up to d_max");
  double x = 0;
  const Polytope spike = spike_containing_ball(dstar, eps, rad, &x);
  const Ball B = centred_ball(Geometry::spherical(dstar), rad);
  r.d = dstar;
  r.best = contains_ball(spike, B, 1e-9) ? total_edge_length(spike) : std::numeric_limits<double>::infinity();
  r.benchmark = spherical_regular_TEL(rad, dstar);
  r.trials = r.evaluated = 1;
  r.details = Json{{"first_dimension", dstar}, {"spike_x", x}, {"d_pi_plus_eps", dstar * std::numbers::pi + eps}};
  return r;
}

// ------------------------------------------------------------ densities

inline Report annulus(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const auto eps_list = e.list("eps", {0.01, 0.02, 0.04, 0.08, 0.16});
  std::vector<double> lx, lreg, liso;
  Json rows = Json::array();
  int idx = 0;
  for (double eps : eps_list) {
    const auto [treg, tiso] = annulus_triangles(eps);
    const DensityFn rho = DensityFn::annulus(eps);
    MCConfig c = e.mc(100 + idx++);
    c.jobs = e.jobs;
    const Estimate a = density_integral(treg, rho, c);
    c.seed += 7;
    const Estimate b = density_integral(tiso, rho, c);
    lx.push_back(std::log(eps));
    lreg.push_back(std::log(a.value));
    liso.push_back(std::log(b.value));
    rows.push_back(Json{{"eps", eps}, {"T_reg", a.value}, {"T_reg_se", a.std_error}, {"T_iso", b.value},
                        {"T_iso_se", b.std_error}, {"T_iso_area", polytope_volume(tiso).value}});
  }
  auto slope = [&](const std::vector<double>& y) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += y[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const double sr = slope(lreg), si = slope(liso);
  r.best = std::max(std::abs(sr - 2.0), std::abs(si - 1.5));
  r.benchmark = 0;
  r.tolerance = e.num("slope_tol", 0.1);
  r.trials = r.evaluated = static_cast<int>(eps_list.size());
  r.details = Json{{"slope_T_reg", sr}, {"slope_T_iso", si}, {"rows", rows},
                   {"iso_beats_regular_at_smallest_eps", liso.front() > lreg.front()}};
  return r;
}

inline DensityFn density_of(const Experiment& e) {
  const std::string kind = e.str("density", e.id == "gaussian" ? "gaussian" : "power");
  if (kind == "gaussian") return DensityFn::gaussian(e.geometry.dim);
  if (kind == "power") return DensityFn::power(e.num("alpha", 1.0));
  throw Error(Errc::invalid_input, "density must be 'gaussian' or 'power'");
}

inline Estimate density_eval(const Experiment& e, const std::optional<Polytope>& P, const Json& q) {
  return density_integral(need_polytope(P), density_of(e), e.mc(stream_of(q)));
}

/// Random Euclidean simplex rescaled about its circumcentre (by_inradius
/// false) or incentre to the given radius, that centre then moved to a
/// random point within `offset` of the origin.
inline Polytope normalized_random_simplex(Rng& rng, int d, double radius, bool by_inradius, double offset) {
  const Geometry g = Geometry::euclidean(d);
  for (;;) {
    try {
      const Polytope S = random_simplex_on_sphere(rng, g, 1.0);
      const Ball b = by_inradius ? inball(S) : circumball(S);
      const Vec target = random_point(rng, g, offset).coords();
      std::vector<Point> v;
      for (const auto& x : S.vertices())
        v.push_back(Point(g, target + (radius / b.radius) * (x.coords() - b.center.coords())));
      return Polytope::from_vertices(std::move(v));
    } catch (const Error&) {
    }
  }
}

inline Report density_simplices(const Experiment& e, const Protocol& p, bool by_inradius) {
  Report r = base_report(e, p);
  const int d = e.geometry.dim;
  const double rad = e.num("radius", by_inradius ? 0.5 : 1.0);
  const double offset = e.num("offset", 0.5);
  const Polytope reg = regular_simplex(e.geometry, by_inradius ? RegularBy::inradius : RegularBy::circumradius, rad);
  MCConfig c = e.mc(999, e.samples * 8);
  c.jobs = e.jobs;
  const Estimate mreg = density_integral(reg, density_of(e), c);
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    tr.params = Json{{"stream", 1000 + t}};
    tr.polytope = normalized_random_simplex(rng, d, rad, by_inradius, offset);
    const Estimate m = density_eval(e, tr.polytope, tr.params);
    tr.value = m.value;
    tr.sigma = m.std_error;
    tr.ok = true;
    return tr;
  });
  summarize(r, ts, mreg.value, mreg.std_error);
  r.details["regular_measure"] = mreg.value;
  return r;
}

// ------------------------------------------------------------------ shadow

inline Estimate shadow_eval(const Experiment&, const std::optional<Polytope>&, const Json& q) {
  std::vector<Vec> pts;
  for (const auto& row : q.at("points")) {
    Vec x(row.size());
    for (size_t i = 0; i < row.size(); ++i) x[static_cast<int>(i)] = row[i].get<double>();
    pts.push_back(x);
  }
  const auto lambda = q.at("lambda").get<std::vector<double>>();
  const auto vv = q.at("v").get<std::vector<double>>();
  const Vec v = Eigen::Map<const Vec>(vv.data(), static_cast<int>(vv.size()));
  const double t1 = q.at("t1"), t2 = q.at("t2");
  const double mid = shadow_volume(pts, lambda, v, 0.5 * (t1 + t2));
  return {0.5 * (shadow_volume(pts, lambda, v, t1) + shadow_volume(pts, lambda, v, t2)) - mid, 0.0};
}

inline Report shadow(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const int d = e.geometry.dim;
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    const int k = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    Json pts = Json::array(), lam = Json::array();
    for (int i = 0; i < k; ++i) {
      const Vec x = gaussian_vec(rng, d);
      pts.push_back(std::vector<double>(x.data(), x.data() + d));
      lam.push_back(uniform(rng, -1, 1));
    }
    const Vec v = random_unit(rng, d);
    tr.params = Json{{"points", pts}, {"lambda", lam}, {"v", std::vector<double>(v.data(), v.data() + d)},
                     {"t1", uniform(rng, -2, 2)}, {"t2", uniform(rng, -2, 2)}};
    tr.value = shadow_eval(e, std::nullopt, tr.params).value;
    tr.ok = true;
    return tr;
  });
  summarize(r, ts, 0.0);
  int strict = 0;
  for (const auto& t : ts) strict += t.value > 1e-12;
  r.details["strictly_convex_cases"] = strict;
  return r;
}

// ------------------------------------------------------- hyperbolic TEL

inline Estimate tel_eval(const Experiment&, const std::optional<Polytope>& P, const Json&) {
  return {total_edge_length(need_polytope(P)), 0.0};
}

inline Report edgelength_hh(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const Geometry g = e.geometry;
  const double rad = e.num("radius", 0.2);
  const Ball B = centred_ball(g, rad);
  const auto cands = edgelength_HH_candidates(g.dim, B);
  double bench = std::numeric_limits<double>::infinity();
  Json cj = Json::array();
  for (const auto& c : cands) {
    cj.push_back(Json{{"family", c.family}, {"tel", c.tel}});
    bench = std::min(bench, c.tel);
  }
  DescentOptions opt;
  opt.objective.kind = Objective::tel;
  opt.direction = Direction::minimize;
  opt.constraint = {ConstraintKind::circumscribed, B};
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    for (int attempt = 0; attempt < 1000 && !tr.ok; ++attempt) {
      try {
        std::vector<Point> pts;
        for (int i = 0; i < g.dim + 2; ++i)
          pts.push_back(exp_base(g, random_unit(rng, g.dim) * uniform(rng, 2 * rad, 2 * rad + 1.0)));
        const Polytope P0 = Polytope::from_vertices(pts);
        if (inball(P0).radius < rad) continue;
        tr.polytope = symmetrization_descent(P0, opt).polytope;
        tr.value = tel_eval(e, tr.polytope, tr.params).value;
        tr.ok = true;
      } catch (const Error&) {
      }
    }
    return tr;
  });
  summarize(r, ts, bench);
  r.details["candidates"] = cj;
  return r;
}

// ---------------------------------------------------------- k-content

inline Estimate kcontent_eval(const Experiment& e, const std::optional<Polytope>& P, const Json&) {
  const Polytope& Q = need_polytope(P);
  const int k = e.integer("k", 1), d = Q.dim();
  const double c = k_content(Q, k).value;
  if (e.str("normalize", "volume") == "inradius") return {c / std::pow(inball(Q).radius, k), 0.0};
  return {c / std::pow(polytope_volume(Q).value, static_cast<double>(k) / d), 0.0};
}

inline Report kcontent_minima(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const int d = e.geometry.dim, k = e.integer("k", 1);
  require(k >= 1 && k <= d - 1, Errc::invalid_input, "k must be in [1, d-1]");
  const bool by_ir = e.str("normalize", "volume") == "inradius";
  auto score = [&](const Polytope& P) { return kcontent_eval(e, P, Json::object()).value; };
  auto safe = [&](const std::function<Polytope()>& build) {
    try {
      return score(build());
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Json fam = Json::object();
  // (iii) regular simplex
  fam["regular"] = score(regular_simplex(e.geometry, RegularBy::circumradius, 1.0));
  // (i) joins, one free size ratio
  double best_i = std::numeric_limits<double>::infinity();
  for (int k1 = 1; k1 <= d / 2; ++k1) {
    double f;
    detail::golden_section([&](double x) { return safe([&] { return orthogonal_join(e.geometry, k1, 1.0, std::exp(x)); }); },
                           -4, 4, &f);
    fam["join k1=" + std::to_string(k1)] = f;
    best_i = std::min(best_i, f);
  }
  // (ii) stacked joins with k1, k2 <= k
  double best_ii = std::numeric_limits<double>::infinity();
  for (int k1 = 1; k1 <= k; ++k1)
    for (int k2 = k1; k2 <= k && k1 + k2 <= d - 1; ++k2) {
      std::vector<double> x{0.0, 0.0, 0.5};
      const double f = detail::coordinate_search(
          [&](const std::vector<double>& y) {
            return safe([&] { return stacked_join(d, k1, k2, 1.0, std::exp(y[0]), std::exp(y[1]), y[2]); });
          },
          x, 1.5, 1e-5);
      fam["stacked k1=" + std::to_string(k1) + " k2=" + std::to_string(k2)] = f;
      best_ii = std::min(best_ii, f);
    }
  const double reg = fam["regular"].get<double>();
  const double bench = std::min({reg, best_i, best_ii});
  const std::string winner = bench == reg ? "regular simplex (iii)" : bench == best_i ? "join (i)" : "stacked join (ii)";

  DescentOptions opt;
  opt.objective.kind = Objective::kcontent;
  opt.objective.k = k;
  opt.direction = Direction::minimize;
  opt.constraint = by_ir ? Constraint{ConstraintKind::circumscribed, centred_ball(e.geometry, 1.0)}
                         : Constraint{ConstraintKind::unit_volume, std::nullopt};
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    for (int attempt = 0; attempt < 1000 && !tr.ok; ++attempt) {
      try {
        const Polytope P0 = Polytope::from_vertices(random_points(rng, e.geometry, d + 2, 1.0));
        tr.polytope = symmetrization_descent(P0, opt).polytope;
        tr.value = kcontent_eval(e, tr.polytope, tr.params).value;
        tr.ok = true;
      } catch (const Error&) {
      }
    }
    return tr;
  });
  summarize(r, ts, bench);
  r.details["families"] = fam;
  r.details["empirical_winner"] = winner;
  r.note = "The families are compared empirically; no uniqueness of the minimizer is asserted.";
  return r;
}

// ---------------------------------------------------- Steiner bounds

inline Estimate steiner_bound_eval(const Experiment&, const std::optional<Polytope>& P, const Json& q) {
  const Polytope& Q = need_polytope(P);
  const Polytope S = steiner_bound(Q, q.at("i").get<int>(), q.at("j").get<int>());
  return {polygon_area_exact(S) - polygon_area_exact(Q), 0.0};
}

inline Report steiner_monotone(const Experiment& e, const Protocol& p) {
  Report r = base_report(e, p);
  const Geometry g = e.geometry;
  require(g.dim == 2, Errc::invalid_input, "exact areas need d = 2");
  const int n = e.integer("vertices", 3);
  const double radius = e.num("radius", 1.0);
  const auto ts = run_trials(e, e.trials, [&](int t) {
    Rng rng = trial_rng(e, t);
    Trial tr;
    for (int attempt = 0; attempt < 1000 && !tr.ok; ++attempt) {
      try {
        const Polytope P = Polytope::from_vertices(random_points(rng, g, n, radius));
        const auto edges = admissible_edges(P);
        if (edges.empty()) continue;
        const auto [i, j] = edges[rng() % edges.size()];
        tr.polytope = P;
        tr.params = Json{{"i", i}, {"j", j}};
        tr.value = steiner_bound_eval(e, tr.polytope, tr.params).value;
        tr.ok = true;
      } catch (const Error&) {
      }
    }
    return tr;
  });
  summarize(r, ts, 0.0);
  return r;
}

}  // namespace proto

inline const std::vector<Protocol>& protocols() {
  using namespace proto;
  static const std::vector<Protocol> all = {
      {"g4_tie", "volume", "circumscribed", "E",
       "g_4(1) = g_4(2) = 48 (relative deviation from 48).", Relation::le, g4_tie, {}},
      {"closed_forms", "volume", "circumscribed", "E",
       "f_k(t*) = g_d(k) for 1 <= k < d <= d_max and euvolir_bound(2) = 4 (max relative error).", Relation::le,
       closed_forms, {}},
      {"euvol", "volume", "none", "E",
       "Triangulated volume of the orthogonal join equals the printed closed form (ratio 1).", Relation::eq, euvol,
       euvol_eval},
      {"inball_identity", "inradius", "circumscribed", "E",
       "Joins with (r1^2 - 1)(r2^2 - 1) = 1 have inradius 1.", Relation::eq, inball_identity, inball_eval},
      {"ratio", "ratio", "none", "EHS",
       "tanh R >= d tanh r (H), tan R >= d tan r (S, d <= 3), R >= d r (E); equality for regular simplices.",
       Relation::ge, ratio, ratio_eval},
      {"inscribedvol", "volume", "inscribed", "EHS",
       "A polytope with d+2 vertices in B has volume at most that of the best orthogonal join inscribed in B.",
       Relation::le, inscribedvol, volume_eval},
      {"circumscribed_dp1", "volume", "circumscribed", "EH",
       "Simplices containing B have volume at least that of the regular simplex circumscribed about B "
       "(the printed statement says maximal; the proof and the symmetrization direction give minimal).",
       Relation::ge, circumscribed_simplex, volume_eval},
      {"circumscribed_dp2", "volume", "circumscribed", "E",
       "Polytopes with d+2 vertices and unit inradius have volume at least the best orthogonal join (or regular "
       "simplex), volumes from the Gram determinant.",
       Relation::ge, [](const Experiment& e, const Protocol& p) { return circumscribed_polytope(e, p, false); },
       volume_per_inradius_eval},
      {"volinradius", "volume", "circumscribed", "E",
       "Unit-inradius polytopes with at most d+2 vertices against the printed bound, read as a lower bound "
       "(volume is unbounded above at fixed inradius).",
       Relation::ge, [](const Experiment& e, const Protocol& p) { return circumscribed_polytope(e, p, true); },
       volume_per_inradius_eval},
      {"circumscribed_sph", "volume", "circumscribed", "S",
       "Tetrahedra containing B in S^3 have volume at least the circumscribed regular tetrahedron (within 3 MC "
       "standard errors).",
       Relation::ge, circumscribed_simplex, volume_eval},
      {"problem_smw", "volume", "circumscribed", "S",
       "Open problem: simplices containing B in S^d versus the circumscribed regular simplex. Random search "
       "evidence only.",
       Relation::ge, circumscribed_simplex, volume_eval},
      {"moment", "moment", "none", "S",
       "Perturbing the regular configuration never lowers the nearest-point moment by more than the quadrature "
       "error.",
       Relation::ge, moment, moment_eval},
      {"TEL_spherical_i", "TEL", "circumscribed", "S",
       "For r near pi/2 a spike simplex containing B has smaller total edge length than the circumscribed "
       "regular simplex.",
       Relation::lt, tel_spherical_i, {}},
      {"TEL_spherical_ii", "TEL", "circumscribed", "S",
       "For fixed r and large d a spike simplex containing B beats the circumscribed regular simplex.",
       Relation::lt, tel_spherical_ii, {}},
      {"edgelength_HH", "TEL", "circumscribed", "H",
       "Polytopes with d+2 vertices containing B have total edge length at least the best of the three "
       "candidate families.",
       Relation::ge, edgelength_hh, tel_eval},
      {"kcontent_minima", "k-content", "unit-volume", "E",
       "Descent minima of total k-content are no better than the best of the three candidate families.",
       Relation::ge, kcontent_minima, kcontent_eval},
      {"annulus", "density", "inscribed", "E",
       "Annulus density integrals scale as eps^2 (regular) and eps^1.5 (thin isosceles): max slope deviation.",
       Relation::le, annulus, {}},
      {"gaussian", "density", "inscribed", "E",
       "Simplices of circumradius R have Gaussian measure at most that of the centred regular simplex.",
       Relation::le, [](const Experiment& e, const Protocol& p) { return density_simplices(e, p, false); },
       density_eval},
      {"density_increasing", "density", "circumscribed", "E",
       "For an increasing radial density, simplices of inradius r have measure at least the centred regular "
       "simplex (centring fibre chords lowers the integral of an increasing density).",
       Relation::ge, [](const Experiment& e, const Protocol& p) { return density_simplices(e, p, true); },
       density_eval},
      {"shadow", "volume", "none", "E",
       "Simplex volume in a shadow system is convex in the parameter (midpoint slack).", Relation::ge, shadow,
       shadow_eval},
      {"steiner_bound", "volume", "none", "HS",
       "The bounding polytope of an edge symmetrization has at least the original area.", Relation::ge,
       steiner_monotone, steiner_bound_eval},
  };
  return all;
}

inline const Protocol& find_protocol(const std::string& id) {
  for (const auto& p : protocols())
    if (p.id == id) return p;
  throw Error(Errc::invalid_input, "unknown experiment id '" + id + "'");
}

/// Checks the objective/constraint pair and geometry against the protocol.
inline void validate(const Experiment& e, const Protocol& p) {
  require(e.objective.empty() || e.objective == p.objective, Errc::invalid_input,
          "experiment " + e.id + " expects objective '" + p.objective + "', got '" + e.objective + "'");
  // kcontent_minima may normalize by inradius instead of volume
  const bool alt = p.id == "kcontent_minima" && e.constraint == "circumscribed";
  require(e.constraint.empty() || e.constraint == p.constraint || alt, Errc::invalid_input,
          "experiment " + e.id + " expects constraint '" + p.constraint + "', got '" + e.constraint + "'");
  require(p.spaces.find(space_tag(e.geometry.space)) != std::string::npos, Errc::invalid_input,
          "experiment " + e.id + " runs in " + p.spaces + ", not " + geometry_name(e.geometry));
  require(e.jobs >= 1, Errc::invalid_input, "jobs must be positive");
}

/// Runs the protocol of e.id. Never claims a proof: a pass means no
/// counterexample at the stated tolerance in the trials run.
inline Report verify(Experiment e) {
  const Protocol& p = find_protocol(e.id);
  if (e.objective.empty()) e.objective = p.objective;
  if (e.constraint.empty()) e.constraint = p.constraint;
  validate(e, p);
  if (e.id == "kcontent_minima" && e.constraint == "circumscribed") e.params["normalize"] = "inradius";
  Report r = p.run(e, p);
  if (r.pass() || !p.evaluate) r.counterexample.reset();
  return r;
}

/// Writes the counterexample of a failed report next to `dir`; returns the path.
inline std::string dump_counterexample(const Experiment& e, Report& r, const std::string& dir) {
  require(r.counterexample.has_value(), Errc::invalid_input, "report has no counterexample");
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (e.id + "-seed" + std::to_string(e.seed) + ".json")).string();
  Json j{{"kind", "counterexample"},
         {"experiment", e.to_json()},
         {"instance", r.counterexample->instance},
         {"value", r.counterexample->value},
         {"benchmark", r.counterexample->benchmark}};
  write_file(path, j.dump(2) + "\n");
  r.dump_path = path;
  return path;
}

/// Recomputes a dumped instance. The report fails again if the violation
/// persists; details record whether the dumped value was reproduced.
inline Report reverify(const Json& dump, const std::string& source) {
  require(dump.value("kind", "") == "counterexample", Errc::invalid_input, "not a counterexample dump");
  Experiment e = experiment_from_json(dump.at("experiment"));
  e.source = source;
  const Protocol& p = find_protocol(e.id);
  require(static_cast<bool>(p.evaluate), Errc::invalid_input, "experiment " + e.id + " has no instance evaluator");
  const Json& inst = dump.at("instance");
  std::optional<Polytope> P;
  if (inst.contains("polytope")) P = polytope_from_json(inst["polytope"]);
  const Estimate v = p.evaluate(e, P, inst.at("params"));
  Report r = proto::base_report(e, p);
  r.claim = "Re-evaluation of a dumped instance. " + p.claim;
  r.trials = r.evaluated = 1;
  r.best = v.value;
  r.benchmark = dump.at("benchmark").get<double>();
  const double dumped = dump.at("value").get<double>();
  r.tolerance = dump.at("experiment").value("tol", e.tol);
  r.details = Json{{"dumped_value", dumped},
                   {"recomputed_value", v.value},
                   {"difference", std::abs(v.value - dumped)},
                   {"reproduced", std::abs(v.value - dumped) <= 1e-12}};
  return r;
}

}  // namespace isop
