// isop: command line front end for the polytope library and the
// verification harness. Exit codes: 0 success, 2 verification failure,
// 3 invalid input.

#include "isop/protocols.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>

using namespace isop;

namespace {

constexpr int exit_fail = 2;
constexpr int exit_invalid = 3;

struct Globals {
  std::uint64_t seed = 1;
  std::uint64_t samples = 0;  // 0: keep the experiment's own value
  double tol = -1;            // negative: keep the experiment's own value
  std::string format = "json";
  int jobs = 1;
  std::string dump_dir = "counterexamples";
};

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  return read_file(path);
}

Polytope read_polytope(const std::string& path) {
  Json j;
  try {
    j = Json::parse(slurp(path));
  } catch (const Json::exception& e) {
    throw Error(Errc::invalid_input, std::string("not JSON: ") + e.what());
  }
  // accept a bare polytope or anything with a "polytope" member
  if (j.contains("polytope")) return polytope_from_json(j["polytope"]);
  if (j.contains("instance") && j["instance"].contains("polytope")) return polytope_from_json(j["instance"]["polytope"]);
  return polytope_from_json(j);
}

MCConfig mc_of(const Globals& gl, std::uint64_t default_samples = 2'000'000) {
  MCConfig c;
  c.samples = gl.samples ? gl.samples : default_samples;
  c.seed = gl.seed;
  c.jobs = gl.jobs;
  return c;
}

Json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Renders a flat object as JSON, a two-line CSV, or a Markdown table.
std::string render_flat(const Json& j, Format f) {
  if (f == Format::json) return j.dump(2) + "\n";
  std::ostringstream os;
  os << std::setprecision(17);
  auto cell = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (f == Format::csv) {
    bool first = true;
    for (const auto& [k, v] : j.items()) os << (first ? "" : ",") << k, first = false;
    os << "\n";
    first = true;
    for (const auto& [k, v] : j.items()) os << (first ? "" : ",") << '"' << cell(v) << '"', first = false;
    os << "\n";
    return os.str();
  }
  os << "| field | value |\n|---|---|\n";
  for (const auto& [k, v] : j.items()) os << "| " << k << " | " << cell(v) << " |\n";
  return os.str();
}

std::string render_polytope(const Polytope& P, Format f) {
  if (f == Format::json) return polytope_to_json(P).dump(2) + "\n";
  std::ostringstream os;
  os << std::setprecision(17);
  const int n = static_cast<int>(P.vertex(0).coords().size());
  if (f == Format::csv) {
    os << "vertex";
    for (int i = 0; i < n; ++i) os << ",x" << i;
    os << "\n";
  } else {
    os << "Polytope in " << geometry_name(P.geometry()) << " (ambient coordinates)\n\n| vertex |";
    for (int i = 0; i < n; ++i) os << " x" << i << " |";
    os << "\n|---|";
    for (int i = 0; i < n; ++i) os << "---|";
    os << "\n";
  }
  for (int v = 0; v < P.size(); ++v) {
    os << (f == Format::md ? "| " : "") << v;
    for (int i = 0; i < n; ++i) os << (f == Format::md ? " | " : ",") << P.vertex(v).coords()[i];
    os << (f == Format::md ? " |\n" : "\n");
  }
  return os.str();
}

/// "k=2" or "2" -> 2.
int parse_join_spec(const std::string& s) {
  const std::string t = s.rfind("k=", 0) == 0 ? s.substr(2) : s;
  try {
    size_t pos = 0;
    const int k = std::stoi(t, &pos);
    if (pos == t.size()) return k;
  } catch (const std::exception&) {
  }
  throw Error(Errc::invalid_input, "--join expects k=<int>, got '" + s + "'");
}

Geometry geometry_of(const std::string& tag, int d) {
  require(d >= 1, Errc::invalid_input, "--d must be positive");
  return Geometry{parse_space(tag), d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polytope extremal problems in E^d, H^d and S^d: constructions, measures and verification."};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals gl;
  app.add_option("--seed", gl.seed, "RNG seed")->capture_default_str();
  app.add_option("--samples", gl.samples, "Monte Carlo samples (overrides experiment files)")->envname("ISOP_SAMPLES");
  app.add_option("--tol", gl.tol, "verification tolerance (overrides experiment files)");
  app.add_option("--format", gl.format, "output format")->check(CLI::IsMember({"json", "csv", "md"}))->capture_default_str();
  app.add_option("--jobs", gl.jobs, "worker threads")->envname("ISOP_JOBS")->check(CLI::PositiveNumber)->capture_default_str();

  // construct
  auto* construct = app.add_subcommand("construct", "emit an extremal polytope as JSON");
  std::string geo = "E", family = "regular", by = "circumradius";
  int d = 3, k = 1;
  double r1 = 1.0, r2 = 1.0, value = 1.0, eps = 0.01, t_param = std::numeric_limits<double>::quiet_NaN();
  std::string join_spec;
  bool unit_inball = false;
  construct->add_option("--geometry", geo, "E, H or S")->capture_default_str();
  construct->add_option("--d", d, "dimension")->capture_default_str();
  construct->add_option("--family", family, "join | regular | inscribed-join | spike | annulus-reg | annulus-iso")
      ->capture_default_str();
  construct->add_option("--k", k, "dimension of the first join factor")->capture_default_str();
  construct->add_option("--join", join_spec, "shorthand for --family join --k K, written k=K");
  construct->add_option("--r1", r1, "inradius of the first join factor")->capture_default_str();
  construct->add_option("--r2", r2, "inradius of the second join factor")->capture_default_str();
  construct->add_flag("--unit-inball", unit_inball, "join with inball radius 1 (Euclidean)");
  construct->add_option("--t", t_param, "log parameter of the unit-inball join (default: volume minimizer)");
  construct->add_option("--by", by, "regular simplex size: circumradius | inradius | edge")->capture_default_str();
  construct->add_option("--value", value, "size for --family regular, ball radius for inscribed-join/spike")
      ->capture_default_str();
  construct->add_option("--eps", eps, "spike or annulus parameter")->capture_default_str();

  // polytope queries
  std::string input;
  auto* volume = app.add_subcommand("volume", "volume of a polytope JSON file ('-' reads stdin)");
  volume->add_option("polytope", input)->required();
  auto* kcontent = app.add_subcommand("kcontent", "total k-content of the k-skeleton");
  kcontent->add_option("polytope", input)->required();
  kcontent->add_option("--k", k, "face dimension")->capture_default_str();
  auto* inb = app.add_subcommand("inball", "largest contained ball");
  inb->add_option("polytope", input)->required();
  auto* circ = app.add_subcommand("circumball", "smallest containing ball");
  circ->add_option("polytope", input)->required();

  auto* sym = app.add_subcommand("symmetrize", "symmetrize about the bisector of an edge, or run the descent");
  sym->add_option("polytope", input)->required();
  std::vector<int> edge;
  bool descent = false;
  std::string objective = "volume", direction = "max", constraint = "inscribed";
  double radius = 1.0;
  sym->add_option("--edge", edge, "vertex pair I J")->expected(2);
  sym->add_flag("--descent", descent, "repeat best-improvement steps to a fixed point");
  sym->add_option("--objective", objective, "volume | TEL | k-content | inradius")->capture_default_str();
  sym->add_option("--direction", direction, "max | min")->check(CLI::IsMember({"max", "min"}))->capture_default_str();
  sym->add_option("--constraint", constraint, "inscribed | circumscribed | unit-volume | none")->capture_default_str();
  sym->add_option("--radius", radius, "radius of the constraint ball, centred at the basepoint")->capture_default_str();

  auto* dens = app.add_subcommand("density", "integral of a radial density over a Euclidean polytope");
  dens->add_option("polytope", input)->required();
  std::string density_kind = "gaussian";
  double density_param = 1.0;
  dens->add_option("--density", density_kind, "gaussian | power | annulus | constant")->capture_default_str();
  dens->add_option("--param", density_param, "alpha for power, eps for annulus, c for constant")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "run an experiment file, or re-check a counterexample dump");
  std::string exp_path;
  int trials = 0;
  ver->add_option("experiment", exp_path, "experiment TOML or counterexample JSON")->required();
  ver->add_option("--trials", trials, "override the trial count");
  ver->add_option("--dump-dir", gl.dump_dir, "where counterexample candidates are written")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "parameter grids as tables");
  bool tel_crossing = false, join_profile = false;
  double rmin = 0.05, rmax = 1.5;
  int steps = 60;
  sweep->add_flag("--tel-crossing", tel_crossing, "f(r,d) - d pi over r, with the sign change bracketed");
  sweep->add_flag("--join-profile", join_profile, "unit-inball join volume against t for every k");
  sweep->add_option("--d", d, "dimension")->capture_default_str();
  sweep->add_option("--rmin", rmin)->capture_default_str();
  sweep->add_option("--rmax", rmax)->capture_default_str();
  sweep->add_option("--steps", steps)->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_invalid;
  }

  try {
    const Format fmt = parse_format(gl.format);

    if (*construct) {
      const Geometry g = geometry_of(geo, d);
      if (!join_spec.empty()) {
        family = "join";
        k = parse_join_spec(join_spec);
      }
      std::optional<Polytope> P;
      if (family == "join") {
        require(k >= 1 && k < d, Errc::invalid_input, "join needs 1 <= k < d");
        if (unit_inball) {
          require(g.is_euclidean(), Errc::invalid_input, "--unit-inball joins are Euclidean");
          P = unit_inball_join(d, k, std::isnan(t_param) ? t_star(d, k) : t_param);
        } else {
          P = orthogonal_join(g, k, r1, r2);
        }
      } else if (family == "regular") {
        const RegularBy rb = by == "inradius" ? RegularBy::inradius
                             : by == "edge"   ? RegularBy::edge
                             : by == "circumradius"
                                 ? RegularBy::circumradius
                                 : throw Error(Errc::invalid_input, "--by must be circumradius, inradius or edge");
        P = regular_simplex(g, rb, value);
      } else if (family == "inscribed-join") {
        P = inscribed_join(g, k, value);
      } else if (family == "spike") {
        require(g.is_spherical(), Errc::invalid_input, "spike simplices live in S^d");
        P = spike_containing_ball(d, eps, value);
      } else if (family == "annulus-reg" || family == "annulus-iso") {
        const auto [a, b] = annulus_triangles(eps);
        P = family == "annulus-reg" ? a : b;
      } else {
        throw Error(Errc::invalid_input, "unknown family '" + family + "'");
      }
      std::cout << render_polytope(*P, fmt);
      return 0;
    }

    if (*volume) {
      const Polytope P = read_polytope(input);
      const Estimate v = polytope_volume(P, VolumeMethod::automatic, mc_of(gl));
      std::cout << render_flat(Json{{"geometry", geometry_name(P.geometry())}, {"volume", v.value},
                                    {"std_error", v.std_error}, {"exact", v.std_error == 0.0}},
                               fmt);
      return 0;
    }
    if (*kcontent) {
      const Polytope P = read_polytope(input);
      const Estimate v = k_content(P, k, VolumeMethod::automatic, mc_of(gl));
      std::cout << render_flat(Json{{"k", k}, {"content", v.value}, {"std_error", v.std_error}}, fmt);
      return 0;
    }
    if (*inb || *circ) {
      const Polytope P = read_polytope(input);
      const Ball b = *inb ? inball(P) : circumball(P);
      std::cout << render_flat(Json{{"radius", b.radius}, {"center", vec_json(b.center.coords())}}, fmt);
      return 0;
    }

    if (*sym) {
      const Polytope P = read_polytope(input);
      if (!descent) {
        require(edge.size() == 2, Errc::invalid_input, "--edge I J is required without --descent");
        std::cout << render_polytope(steiner_bound(P, edge[0], edge[1]), fmt);
        return 0;
      }
      DescentOptions o;
      o.objective.kind = parse_objective(objective);
      o.objective.mc = mc_of(gl, 200'000);
      o.direction = direction == "max" ? Direction::maximize : Direction::minimize;
      o.constraint.kind = parse_constraint(constraint);
      if (o.constraint.kind == ConstraintKind::inscribed || o.constraint.kind == ConstraintKind::circumscribed)
        o.constraint.ball = Ball{basepoint(P.geometry()), radius};
      const DescentResult r = symmetrization_descent(P, o);
      if (fmt != Format::json) {
        std::cout << render_polytope(r.polytope, fmt);
        return 0;
      }
      Json steps_json = Json::array();
      for (const auto& [i, j] : r.edges) steps_json.push_back(Json{i, j});
      std::cout << Json{{"polytope", polytope_to_json(r.polytope)},
                        {"objective", r.history.back()},
                        {"history", r.history},
                        {"edges", steps_json},
                        {"fixed_point", r.fixed_point},
                        {"asymmetry", bisector_asymmetry(r.polytope)}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (*dens) {
      const Polytope P = read_polytope(input);
      DensityFn rho = density_kind == "gaussian" ? DensityFn::gaussian(P.dim())
                      : density_kind == "power"  ? DensityFn::power(density_param)
                      : density_kind == "annulus"
                          ? DensityFn::annulus(density_param)
                          : density_kind == "constant"
                                ? DensityFn::constant(density_param)
                                : throw Error(Errc::invalid_input, "unknown density '" + density_kind + "'");
      const Estimate v = density_integral(P, rho, mc_of(gl));
      std::cout << render_flat(Json{{"density", density_kind}, {"integral", v.value}, {"std_error", v.std_error}},
                               fmt);
      return 0;
    }

    if (*ver) {
      const std::string text = slurp(exp_path);
      const bool is_dump = exp_path.size() > 5 && exp_path.substr(exp_path.size() - 5) == ".json";
      if (is_dump) {
        Json dump;
        try {
          dump = Json::parse(text);
        } catch (const Json::exception& e) {
          throw Error(Errc::invalid_input, std::string("not JSON: ") + e.what());
        }
        const Report r = reverify(dump, text);
        std::cout << render(r, fmt);
        return r.pass() ? 0 : exit_fail;
      }
      Experiment e = parse_experiment(text);
      // flags given on the command line win over the file
      if (app.get_option("--seed")->count()) e.seed = gl.seed;
      if (gl.samples) e.samples = gl.samples;
      if (gl.tol >= 0) e.tol = gl.tol;
      if (trials > 0) e.trials = trials;
      e.jobs = gl.jobs;
      Report r = verify(e);
      if (!r.pass() && r.counterexample) dump_counterexample(e, r, gl.dump_dir);
      std::cout << render(r, fmt);
      return r.pass() ? 0 : exit_fail;
    }

    if (*sweep) {
      require(tel_crossing != join_profile, Errc::invalid_input, "choose one of --tel-crossing or --join-profile");
      require(d >= 2, Errc::invalid_input, "--d must be at least 2");
      Json rows = Json::array();
      if (tel_crossing) {
        require(0 < rmin && rmin < rmax && rmax < std::numbers::pi / 2, Errc::invalid_input,
                "need 0 < rmin < rmax < pi/2");
        auto f = [&](double r) { return spherical_regular_TEL(r, d) - d * std::numbers::pi; };
        double prev_r = rmin, prev_f = f(rmin);
        Json crossing = nullptr;
        for (int i = 0; i <= steps; ++i) {
          const double r = rmin + (rmax - rmin) * i / steps, v = f(r);
          rows.push_back(Json{{"r", r}, {"tan2_r", std::tan(r) * std::tan(r)}, {"f_minus_d_pi", v},
                              {"sign", v > 0 ? 1 : v < 0 ? -1 : 0}});
          if (i > 0 && crossing.is_null() && (prev_f < 0) != (v < 0)) {
            double a = prev_r, b = r;
            for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
              const double m = 0.5 * (a + b);
              ((f(m) < 0) == (prev_f < 0) ? a : b) = m;
            }
            crossing = Json{{"r_lo", a}, {"r_hi", b}, {"tan2_r", std::tan(0.5 * (a + b)) * std::tan(0.5 * (a + b))}};
          }
          prev_r = r;
          prev_f = v;
        }
        if (fmt == Format::json) {
          std::cout << Json{{"d", d}, {"rows", rows}, {"crossing", crossing}}.dump(2) << "\n";
          return 0;
        }
      } else {
        for (int i = 0; i <= steps; ++i) {
          const double t = -3.0 + 6.0 * i / steps;
          Json row{{"t", t}};
          for (int kk = 1; kk < d; ++kk) {
            const double a = std::sqrt(1 + std::exp(t)), b = std::sqrt(1 + std::exp(-t));
            row["volume_k" + std::to_string(kk)] = join_volume(d, kk, a, b);
          }
          rows.push_back(row);
        }
        if (fmt == Format::json) {
          std::cout << Json{{"d", d}, {"rows", rows}}.dump(2) << "\n";
          return 0;
        }
      }
      // csv or a Markdown table
      const bool md = fmt == Format::md;
      const char* sep = md ? " | " : ",";
      std::ostringstream os;
      auto line = [&](const std::vector<std::string>& cells) {
        os << (md ? "| " : "");
        for (size_t i = 0; i < cells.size(); ++i) os << (i ? sep : "") << cells[i];
        os << (md ? " |\n" : "\n");
      };
      std::vector<std::string> head;
      for (const auto& [key, v] : rows[0].items()) head.push_back(key);
      line(head);
      if (md) line(std::vector<std::string>(head.size(), "---"));
      for (const auto& row : rows) {
        std::vector<std::string> cells;
        for (const auto& [key, v] : row.items()) cells.push_back(v.dump());
        line(cells);
      }
      std::cout << os.str();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  }
  return 0;
}
