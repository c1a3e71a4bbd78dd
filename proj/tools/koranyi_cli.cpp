// koranyi-lab: batch front end for the measure laboratory.
//
// Loads MeasureSpec JSON, runs verification / profiling / search commands,
// and writes machine-readable reports.  Every report embeds the fully
// resolved configuration (defaults included) plus the input measure, so a
// run is reproducible from its own output.  No wall-clock data is recorded:
// identical flags and seed produce byte-identical reports.
//
// Exit codes: 0 completed run (a "neither" verdict is still a completed
// run), 2 malformed spec or invalid configuration, 3 unconverged estimates
// under --strict, 1 unexpected internal failure.

#include <CLI11.hpp>

#include <koranyi/cone.hpp>
#include <koranyi/equilateral.hpp>
#include <koranyi/report.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using koranyi::ordered_json;

// ---------------------------------------------------------------------------
// Flag parsing helpers

struct RadiiGrid {
  double min = 1.0 / 64.0;
  double max = 4.0;
  int count = 9;
};

RadiiGrid parse_radii_grid(const std::string& text) {
  RadiiGrid grid;
  char colon1 = 0, colon2 = 0;
  std::istringstream in(text);
  if (!(in >> grid.min >> colon1 >> grid.max >> colon2 >> grid.count) ||
      colon1 != ':' || colon2 != ':' || !(in >> std::ws).eof())
    throw std::invalid_argument("--radii expects MIN:MAX:COUNT, got '" + text +
                                "'");
  if (!(grid.min > 0.0) || !(grid.min < grid.max))
    throw std::invalid_argument("--radii needs 0 < MIN < MAX");
  if (grid.count < 2) throw std::invalid_argument("--radii needs COUNT >= 2");
  return grid;
}

std::vector<double> parse_csv_doubles(const std::string& text,
                                      const char* what) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad number '" + token +
                                  "'");
    }
    while (used < token.size() && std::isspace(static_cast<unsigned char>(
                                      token[used])))
      ++used;
    if (used != token.size())
      throw std::invalid_argument(std::string(what) + ": bad number '" + token +
                                  "'");
    values.push_back(v);
  }
  if (values.empty())
    throw std::invalid_argument(std::string(what) + ": empty coordinate list");
  return values;
}

koranyi::Point parse_point(const std::string& text) {
  const auto values = parse_csv_doubles(text, "--point");
  Eigen::VectorXd coords(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    coords[static_cast<Eigen::Index>(i)] = values[i];
  return koranyi::Point(coords);  // enforces odd length >= 3
}

std::vector<koranyi::Point> parse_point_list(const std::string& text) {
  std::vector<koranyi::Point> points;
  std::istringstream in(text);
  std::string chunk;
  while (std::getline(in, chunk, ';'))
    if (!chunk.empty()) points.push_back(parse_point(chunk));
  if (points.empty())
    throw std::invalid_argument("--points: no points given");
  return points;
}

// ---------------------------------------------------------------------------
// Shared run configuration

struct CommonOptions {
  std::string spec_path;
  std::uint64_t seed = 1;
  double tol = 1e-3;
  double ball_tol = 1e-9;
  std::string radii_text = "0.015625:4:9";
  int num_points = 8;
  long mc_samples = 1'000'000;
  std::string out_path;
  std::string format = "json";
  bool strict = false;
};

void attach_output_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--out", opt.out_path,
                  "Write the report to this path instead of stdout");
  cmd->add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--strict", opt.strict,
                "Exit 3 when any estimate failed to converge");
}

void attach_measure_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--spec", opt.spec_path, "Measure JSON file")
      ->required();
  cmd->add_option("--seed", opt.seed, "Monte Carlo seed")
      ->capture_default_str();
  cmd->add_option("--tol", opt.tol, "Verdict tolerance")
      ->capture_default_str();
  cmd->add_option("--ball-tol", opt.ball_tol,
                  "Quadrature tolerance per ball estimate")
      ->capture_default_str();
  cmd->add_option("--radii", opt.radii_text,
                  "Log-spaced radius grid MIN:MAX:COUNT")
      ->capture_default_str();
  cmd->add_option("--points", opt.num_points, "Number of probe points")
      ->capture_default_str();
  cmd->add_option("--mc-samples", opt.mc_samples,
                  "Monte Carlo samples per ball estimate")
      ->capture_default_str();
  attach_output_flags(cmd, opt);
}

koranyi::UniformityOptions scan_options(const CommonOptions& opt,
                                        const RadiiGrid& grid) {
  koranyi::UniformityOptions uopts;
  uopts.num_points = opt.num_points;
  uopts.radii = koranyi::log_radii(grid.min, grid.max, grid.count);
  uopts.tol = opt.tol;
  uopts.seed = opt.seed;
  uopts.ball.tol = opt.ball_tol;
  uopts.ball.seed = opt.seed;
  uopts.ball.mc_samples = opt.mc_samples;
  return uopts;
}

ordered_json radii_json(const RadiiGrid& grid) {
  ordered_json j;
  j["min"] = grid.min;
  j["max"] = grid.max;
  j["count"] = grid.count;
  j["log_spaced"] = true;
  return j;
}

ordered_json common_config_json(const CommonOptions& opt,
                                const RadiiGrid& grid) {
  ordered_json j;
  j["spec"] = opt.spec_path;
  j["seed"] = opt.seed;
  j["tol"] = opt.tol;
  j["ball_tol"] = opt.ball_tol;
  j["radii"] = radii_json(grid);
  j["points"] = opt.num_points;
  j["mc_samples"] = opt.mc_samples;
  j["format"] = opt.format;
  j["strict"] = opt.strict;
  return j;
}

ordered_json make_report(const std::string& command) {
  ordered_json j;
  j["tool"] = koranyi::tool_name;
  j["version"] = koranyi::tool_version;
  j["schema"] = koranyi::measure_schema_version;
  j["command"] = command;
  return j;
}

// Renders the report and returns the process exit status.  The report is
// always written, even when --strict is about to fail the run.
int emit_report(const ordered_json& report, const CommonOptions& opt,
                bool converged) {
  std::string text;
  if (opt.format == "csv")
    text = koranyi::emit_plot_table(report);
  else
    text = report.dump(2) + "\n";
  if (opt.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open --out " + opt.out_path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + opt.out_path);
  }
  if (opt.strict && !converged) {
    std::cerr << "koranyi-lab: estimates did not converge (strict mode)\n";
    return 3;
  }
  return 0;
}

koranyi::Point default_probe(const koranyi::MeasureSpec& mu,
                             std::uint64_t seed) {
  const auto pts = koranyi::detail::support_points(mu, 1, seed);
  if (pts.empty())
    throw std::invalid_argument("measure has no sampleable support point");
  return pts.front();
}

// ---------------------------------------------------------------------------
// Subcommand bodies.  Each returns the process exit status.

int run_scan_command(const CommonOptions& opt, const std::string& command,
                     bool fit_exponent) {
  const RadiiGrid grid = parse_radii_grid(opt.radii_text);
  const auto mu = koranyi::load_measure_file(opt.spec_path);
  const auto uopts = scan_options(opt, grid);

  koranyi::UniformityReport rep;
  if (command == "profile")
    rep = koranyi::uniformity_scan(mu, uopts);
  else if (fit_exponent)
    rep = koranyi::check_s_uniform(mu, uopts);
  else
    rep = koranyi::check_uniformly_distributed(mu, uopts);

  ordered_json report = make_report(command);
  report["config"] = common_config_json(opt, grid);
  report["spec"] = koranyi::measure_to_json(mu);
  report["results"] = koranyi::uniformity_to_json(rep);
  report["plot"] = koranyi::plot_to_json(koranyi::plot_rows(rep));
  return emit_report(report, opt, koranyi::report_converged(rep));
}

int run_density(const CommonOptions& opt, double s,
                const std::string& point_text) {
  const RadiiGrid grid = parse_radii_grid(opt.radii_text);
  const auto mu = koranyi::load_measure_file(opt.spec_path);
  const koranyi::Point x =
      point_text.empty() ? default_probe(mu, opt.seed) : parse_point(point_text);

  auto radii = koranyi::log_radii(grid.min, grid.max, grid.count);
  std::reverse(radii.begin(), radii.end());  // density wants decreasing radii
  koranyi::BallOptions ball;
  ball.tol = opt.ball_tol;
  ball.seed = opt.seed;
  ball.mc_samples = opt.mc_samples;
  const auto est = koranyi::density(mu, x, s, radii, ball);

  ordered_json report = make_report("density");
  report["config"] = common_config_json(opt, grid);
  report["config"]["s"] = s;
  report["config"]["point"] = koranyi::point_to_json(x);
  report["spec"] = koranyi::measure_to_json(mu);
  report["results"] = koranyi::density_to_json(est);
  return emit_report(report, opt, est.converged);
}

int run_blowup(const CommonOptions& opt, double k, double s,
               const std::string& point_text) {
  const RadiiGrid grid = parse_radii_grid(opt.radii_text);
  const auto mu = koranyi::load_measure_file(opt.spec_path);
  const koranyi::Point x0 =
      point_text.empty() ? default_probe(mu, opt.seed) : parse_point(point_text);

  const auto nu = koranyi::blowup(mu, x0, k, s);
  const koranyi::Point origin(Eigen::VectorXd::Zero(2 * nu.n + 1));
  const double scale = std::pow(k, s);
  koranyi::BallOptions ball;
  ball.tol = opt.ball_tol;
  ball.seed = opt.seed;
  ball.mc_samples = opt.mc_samples;

  // Compare nu(B(0, N)) against k^s mu(B(x0, N/k)) on the radius grid: the
  // two are the same number up to engine error, and their gap is reported
  // per radius.
  const auto radii = koranyi::log_radii(grid.min, grid.max, grid.count);
  ordered_json identity = ordered_json::array();
  std::vector<koranyi::PlotRow> rows;
  bool converged = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double big_n = radii[i];
    const auto blown = koranyi::ball_measure(nu, origin, big_n, ball);
    const auto base = koranyi::ball_measure(mu, x0, big_n / k, ball);
    converged = converged && blown.converged && base.converged;
    const double rescaled = scale * base.value;
    const double rescaled_err = scale * base.abs_error;
    ordered_json entry;
    entry["N"] = big_n;
    entry["blown"] = koranyi::ball_estimate_to_json(blown);
    entry["rescaled_value"] = rescaled;
    entry["rescaled_abs_error"] = rescaled_err;
    entry["gap"] = blown.value - rescaled;
    entry["within_error"] =
        std::abs(blown.value - rescaled) <=
        blown.abs_error + rescaled_err + 1e-12 * (1.0 + std::abs(rescaled));
    identity.push_back(std::move(entry));
    rows.push_back({0, big_n, blown.value, blown.abs_error});
  }

  ordered_json report = make_report("blowup");
  report["config"] = common_config_json(opt, grid);
  report["config"]["k"] = k;
  report["config"]["s"] = s;
  report["config"]["point"] = koranyi::point_to_json(x0);
  report["spec"] = koranyi::measure_to_json(mu);
  ordered_json results;
  results["blown_spec"] = koranyi::measure_to_json(nu);
  results["identity"] = std::move(identity);
  report["results"] = std::move(results);
  report["plot"] = koranyi::plot_to_json(rows);
  return emit_report(report, opt, converged);
}

ordered_json points_json(const std::vector<koranyi::Point>& pts) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : pts) arr.push_back(koranyi::point_to_json(p));
  return arr;
}

int run_equilateral_check(const CommonOptions& opt,
                          const std::string& points_text, double tol) {
  const auto pts = parse_point_list(points_text);
  const auto check = koranyi::is_equilateral(pts, tol);

  ordered_json report = make_report("equilateral-check");
  ordered_json config;
  config["points"] = points_json(pts);
  config["tol"] = tol;
  config["format"] = opt.format;
  report["config"] = std::move(config);
  ordered_json results;
  results["equilateral"] = check.equilateral;
  results["side"] = check.side;
  results["spread"] = check.spread;
  results["distance_multiset"] =
      koranyi::distance_multiset(pts, pts.front());
  report["results"] = std::move(results);
  return emit_report(report, opt, true);
}

int run_equilateral_family(const CommonOptions& opt, double theta,
                           const std::optional<double>& x0, int scan_points) {
  ordered_json report = make_report("equilateral-family");
  ordered_json config;
  config["theta"] = theta;
  if (x0) config["x0"] = *x0;
  config["scan_points"] = scan_points;
  config["format"] = opt.format;
  report["config"] = std::move(config);

  ordered_json results;
  if (x0) {
    // Offset pair family: both pair points sit off the x1-axis; solutions
    // are (r, t) roots of the side-matching condition.
    const auto sols = koranyi::offset_pair_solve(*x0, theta, scan_points);
    results["family"] = "offset-pair";
    results["side"] = koranyi::offset_pair_side(*x0);
    results["pair"] = points_json(
        {koranyi::offset_pair(*x0)[0], koranyi::offset_pair(*x0)[1]});
    ordered_json arr = ordered_json::array();
    for (const auto& sol : sols) {
      ordered_json entry;
      entry["r"] = sol.r;
      entry["t"] = sol.t;
      entry["residual"] = sol.residual;
      entry["triple"] = points_json(koranyi::offset_pair_triple(sol));
      arr.push_back(std::move(entry));
    }
    results["solutions"] = std::move(arr);
  } else {
    // Horizontal pair family: third point at angle theta from the pair
    // {(1,0,0), (-1,0,0)}, side fixed at 2.
    const auto sol = koranyi::horizontal_pair_solution(theta);
    results["family"] = "horizontal-pair";
    results["side"] = 2.0;
    results["r"] = sol.r;
    results["t"] = sol.t;
    results["triple"] = points_json(koranyi::horizontal_pair_triple(theta));
  }
  report["results"] = std::move(results);
  return emit_report(report, opt, true);
}

int run_equilateral_fourth(const CommonOptions& opt, double tol) {
  const auto fourth = koranyi::find_fourth_vertex(tol);

  ordered_json report = make_report("equilateral-fourth");
  ordered_json config;
  config["tol"] = tol;
  config["format"] = opt.format;
  report["config"] = std::move(config);
  ordered_json results;
  results["w3"] = fourth.w3;
  results["vertex"] = koranyi::point_to_json(fourth.vertex);
  results["points"] = points_json(fourth.points);
  results["side"] = fourth.side;
  results["residual"] = fourth.residual;
  report["results"] = std::move(results);
  return emit_report(report, opt, true);
}

int run_equilateral_search(const CommonOptions& opt, int k, int seeds,
                           int iterations) {
  const auto best = koranyi::search_equilateral(k, seeds, iterations);

  ordered_json report = make_report("equilateral-search");
  ordered_json config;
  config["k"] = k;
  config["seeds"] = seeds;
  config["iterations"] = iterations;
  config["format"] = opt.format;
  report["config"] = std::move(config);
  ordered_json results;
  results["points"] = points_json(best.points);
  results["objective"] = best.objective;
  results["side"] = best.side;
  results["best_seed"] = best.best_seed;
  results["evaluations"] = best.evaluations;
  const auto check = koranyi::is_equilateral(best.points, 1e-6);
  results["equilateral_at_1e-6"] = check.equilateral;
  report["results"] = std::move(results);
  return emit_report(report, opt, true);
}

int run_cone_equality(const CommonOptions& opt, int n, int cone_k, double r,
                      long samples, const std::string& point_text) {
  koranyi::Point x;
  if (point_text.empty()) {
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(2 * n + 1);
    coords[0] = 1.0;
    coords[3] = 1.0;  // (1,0,0,1) lies on the cone
    x = koranyi::Point(coords);
  } else {
    x = parse_point(point_text);
    n = x.n();
  }
  const bool agree =
      koranyi::embedded_cone_ball_equality(x, r, samples, cone_k, opt.seed);

  ordered_json report = make_report("cone-equality");
  ordered_json config;
  config["n"] = n;
  config["cone_k"] = cone_k;
  config["r"] = r;
  config["samples"] = samples;
  config["seed"] = opt.seed;
  config["point"] = koranyi::point_to_json(x);
  config["format"] = opt.format;
  report["config"] = std::move(config);
  ordered_json results;
  results["agreement"] = agree;
  results["checked_samples"] = samples;
  report["results"] = std::move(results);
  return emit_report(report, opt, true);
}

int run_cone_product(const CommonOptions& opt, int base_dim) {
  const RadiiGrid grid = parse_radii_grid(opt.radii_text);
  const auto base = koranyi::load_measure_file(opt.spec_path);
  const auto nu = koranyi::heat_product_measure(base, base_dim);
  const auto uopts = scan_options(opt, grid);
  const auto rep = koranyi::check_s_uniform(nu, uopts);

  ordered_json report = make_report("cone-product");
  report["config"] = common_config_json(opt, grid);
  report["config"]["base_dim"] = base_dim;
  report["spec"] = koranyi::measure_to_json(base);
  ordered_json results = koranyi::uniformity_to_json(rep);
  report["results"] = std::move(results);
  report["plot"] = koranyi::plot_to_json(koranyi::plot_rows(rep));
  return emit_report(report, opt, koranyi::report_converged(rep));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Measure laboratory for the Koranyi metric: ball profiles, uniformity "
      "verdicts, densities, blow-ups, and equilateral-set tools"};
  app.require_subcommand(1);

  CommonOptions opt;
  int status = 0;

  // verify-ud / verify-uniform / profile share the scan plumbing.
  auto* verify_ud = app.add_subcommand(
      "verify-ud", "Test whether ball mass depends only on the radius");
  attach_measure_flags(verify_ud, opt);
  verify_ud->callback([&] { status = run_scan_command(opt, "verify-ud", false); });

  auto* verify_uniform = app.add_subcommand(
      "verify-uniform", "Test for an exact power law c*r^s on the support");
  attach_measure_flags(verify_uniform, opt);
  verify_uniform->callback(
      [&] { status = run_scan_command(opt, "verify-uniform", true); });

  auto* profile = app.add_subcommand(
      "profile", "Tabulate ball masses over probe points and radii");
  attach_measure_flags(profile, opt);
  profile->callback([&] { status = run_scan_command(opt, "profile", false); });

  double density_s = 0.0;
  std::string density_point;
  auto* density = app.add_subcommand(
      "density", "Track mu(B(x,r))/r^s along a shrinking radius grid");
  attach_measure_flags(density, opt);
  density->add_option("--s", density_s, "Density exponent")->required();
  density->add_option("--point", density_point,
                      "Probe point as x1,x2,... (default: support sample)");
  density->callback([&] { status = run_density(opt, density_s, density_point); });

  double blow_k = 0.0, blow_s = 0.0;
  std::string blow_point;
  auto* blow = app.add_subcommand(
      "blowup", "Rescale a measure at a support point and check the identity "
                "nu_k(B(0,N)) = k^s mu(B(x0,N/k))");
  attach_measure_flags(blow, opt);
  blow->add_option("--k", blow_k, "Dilation factor")->required();
  blow->add_option("--s", blow_s, "Scaling exponent")->required();
  blow->add_option("--point", blow_point,
                   "Blow-up center as x1,x2,... (default: support sample)");
  blow->callback([&] { status = run_blowup(opt, blow_k, blow_s, blow_point); });

  auto* equilateral = app.add_subcommand(
      "equilateral", "Equilateral-set checks, families, and searches");
  equilateral->require_subcommand(1);

  std::string eq_points;
  double eq_tol = 1e-9;
  auto* eq_check = equilateral->add_subcommand(
      "check", "Verify all pairwise distances of a point list agree");
  eq_check->add_option("--points", eq_points,
                       "Point list as x1,x2,x3;y1,y2,y3;...")
      ->required();
  eq_check->add_option("--tol", eq_tol, "Relative spread tolerance")
      ->capture_default_str();
  attach_output_flags(eq_check, opt);
  eq_check->callback(
      [&] { status = run_equilateral_check(opt, eq_points, eq_tol); });

  double fam_theta = 0.0;
  double fam_x0_value = 0.0;
  int fam_scan_points = 4096;
  auto* eq_family = equilateral->add_subcommand(
      "family", "Solve the third-point families over a two-point base");
  auto* fam_theta_opt =
      eq_family->add_option("--theta", fam_theta, "Family angle parameter");
  fam_theta_opt->required();
  auto* fam_x0_opt = eq_family->add_option(
      "--x0", fam_x0_value, "Offset of the base pair from the x1-axis");
  eq_family->add_option("--scan-points", fam_scan_points,
                        "Root-isolation grid resolution")
      ->capture_default_str();
  attach_output_flags(eq_family, opt);
  eq_family->callback([&] {
    std::optional<double> x0;
    if (fam_x0_opt->count() > 0) x0 = fam_x0_value;
    status = run_equilateral_family(opt, fam_theta, x0, fam_scan_points);
  });

  auto* eq_fourth = equilateral->add_subcommand(
      "fourth", "Complete the standard horizontal triangle to a 4-point set");
  eq_fourth->add_option("--tol", eq_tol, "Bisection tolerance")
      ->capture_default_str();
  attach_output_flags(eq_fourth, opt);
  eq_fourth->callback([&] { status = run_equilateral_fourth(opt, eq_tol); });

  int search_k = 4, search_seeds = 8, search_iterations = 200;
  auto* eq_search = equilateral->add_subcommand(
      "search", "Multi-start descent toward a k-point equilateral set");
  eq_search->add_option("--k", search_k, "Number of points")->required();
  eq_search->add_option("--seeds", search_seeds, "Restart count")
      ->capture_default_str();
  eq_search->add_option("--iterations", search_iterations,
                        "Descent sweeps per restart")
      ->capture_default_str();
  attach_output_flags(eq_search, opt);
  eq_search->callback([&] {
    status = run_equilateral_search(opt, search_k, search_seeds,
                                    search_iterations);
  });

  auto* cone = app.add_subcommand(
      "cone", "Double-cone constructions and fourth-root products");
  cone->require_subcommand(1);

  int cone_n = 4, cone_k = 4;
  double cone_r = 1.0;
  long cone_samples = 10'000;
  std::string cone_point;
  auto* cone_equality = cone->add_subcommand(
      "equality", "Check that group balls cut the embedded cone exactly like "
                  "Euclidean balls");
  cone_equality->add_option("--n", cone_n, "Ambient group index")
      ->capture_default_str();
  cone_equality->add_option("--cone-k", cone_k,
                            "Number of embedding slots (>= 4)")
      ->capture_default_str();
  cone_equality->add_option("--r", cone_r, "Ball radius")
      ->capture_default_str();
  cone_equality->add_option("--samples", cone_samples, "Sample count")
      ->capture_default_str();
  cone_equality->add_option("--seed", opt.seed, "Sampling seed")
      ->capture_default_str();
  cone_equality->add_option("--point", cone_point,
                            "Center as x1,x2,... (default embeds (1,0,0,1))");
  attach_output_flags(cone_equality, opt);
  cone_equality->callback([&] {
    status = run_cone_equality(opt, cone_n, cone_k, cone_r, cone_samples,
                               cone_point);
  });

  int base_dim = 1;
  auto* cone_product = cone->add_subcommand(
      "product", "Cross a base measure with a vertical line under the "
                 "fourth-root product metric and fit the exponent");
  attach_measure_flags(cone_product, opt);
  cone_product->add_option("--base-dim", base_dim,
                           "Coordinates occupied by the base measure")
      ->required();
  cone_product->callback([&] { status = run_cone_product(opt, base_dim); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {  // includes spec_error
    std::cerr << "koranyi-lab: " << e.what() << "\n";
    return 2;
  } catch (const ordered_json::exception& e) {
    std::cerr << "koranyi-lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "koranyi-lab: " << e.what() << "\n";
    return 1;
  }
  return status;
}
