#include "fsg/cli.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fsg/cases.hpp"
#include "fsg/errors.hpp"

namespace fsg::cli {

namespace {

struct Common {
  std::string output;
  std::string format = "csv";
};

int quad_points() {
  const char* env = std::getenv("FSG_QUAD_POINTS");
  if (!env || !*env) return kDefaultQuadPoints;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 200) throw InputError("FSG_QUAD_POINTS must be an integer in [1, 200]");
  return static_cast<int>(v);
}

std::vector<double> linspace(int n, double a = 0.0, double b = 1.0) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = a + (b - a) * k / (n - 1);
  g.back() = b;
  return g;
}

Flavor parse_flavor(const std::string& s) { return s == "l2" ? Flavor::L2 : Flavor::H10; }

std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-o,--output", c.output, "output file (default: stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

struct Driver {
  std::ostream& out;
  std::vector<std::pair<std::string, std::string>> flags;

  void emit(Table t, const Common& c, const std::string& command) {
    std::vector<std::pair<std::string, std::string>> meta{{"command", command}, {"version", kVersion}};
    meta.insert(meta.end(), flags.begin(), flags.end());
    meta.insert(meta.end(), t.meta.begin(), t.meta.end());
    t.meta = std::move(meta);
    const std::string text = render(t, c.format == "json" ? Format::Json : Format::Csv);
    if (c.output.empty())
      out << text;
    else
      write_atomic(c.output, text);
  }
};

// Records every option of a subcommand that has a value, in declaration order.
std::vector<std::pair<std::string, std::string>> collect_flags(const CLI::App* sub) {
  std::vector<std::pair<std::string, std::string>> f;
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_lnames().empty()) continue;
    const std::string& key = o->get_lnames().front();
    if (key == "help" || key == "output" || key == "format" || key == "history") continue;
    std::string v;
    if (o->get_items_expected_max() == 0) {
      v = o->count() > 0 ? "true" : "false";
    } else if (o->count() > 0) {
      const auto r = o->results();
      for (std::size_t k = 0; k < r.size(); ++k) v += (k ? " " : "") + r[k];
    } else {
      v = o->get_default_str();
    }
    f.emplace_back(key, v);
  }
  return f;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual bases and fine-scale Green's functions for 1D/2D projections", "fsg"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::function<void()> action;
  std::string command;
  Driver drv{out, {}};

  // gll
  Common c_gll;
  int gll_p = 3;
  auto* gll = app.add_subcommand("gll", "GLL nodes and weights");
  gll->add_option("--p", gll_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  add_common(gll, c_gll);
  gll->callback([&] {
    command = "gll";
    action = [&] {
      const QuadratureRule r = QuadratureRule::gauss_lobatto(gll_p);
      Table t;
      t.columns = {"i", "node", "weight"};
      for (int i = 0; i < r.size(); ++i) t.add({double(i), r.nodes()[i], r.weights()[i]});
      drv.emit(std::move(t), c_gll, command);
    };
  });

  // basis
  Common c_basis;
  int b_p = 3, b_n = 1, b_grid = 201;
  std::string b_kind = "nodal";
  auto* basis = app.add_subcommand("basis", "sample a basis family");
  basis->add_option("--p", b_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  basis->add_option("--elements", b_n, "number of elements")->check(CLI::Range(1, 100000))->capture_default_str();
  basis->add_option("--kind", b_kind, "nodal, edge, dual-nodal or dual-edge")
      ->check(CLI::IsMember({"nodal", "edge", "dual-nodal", "dual-edge"}))
      ->capture_default_str();
  basis->add_option("--grid", b_grid, "sample points")->check(CLI::Range(2, 10000000))->capture_default_str();
  add_common(basis, c_basis);
  basis->callback([&] {
    command = "basis";
    action = [&] {
      BasisFamily fam(Mesh1D(0.0, 1.0, b_n, b_p));
      std::function<double(int, double)> f;
      int count = 0;
      std::unique_ptr<DualSet> dual;
      if (b_kind == "nodal") {
        count = fam.space_size(Space::Nodal);
        f = [&](int i, double x) { return fam.nodal(i, x); };
      } else if (b_kind == "edge") {
        count = fam.space_size(Space::Edge);
        f = [&](int i, double x) { return fam.edge(i, x); };
      } else {
        dual = std::make_unique<DualSet>(fam, b_kind == "dual-nodal" ? DualKind::DualNodal : DualKind::DualEdge);
        count = dual->size();
        f = [&](int i, double x) { return dual->eval(i, x); };
      }
      Table t;
      t.columns = {"x"};
      for (int i = 0; i < count; ++i) t.columns.push_back("f" + std::to_string(i));
      for (double x : linspace(b_grid)) {
        std::vector<double> row{x};
        for (int i = 0; i < count; ++i) row.push_back(f(i, x));
        t.add(std::move(row));
      }
      drv.emit(std::move(t), c_basis, command);
    };
  });

  // dual
  Common c_dual;
  int d_p = 3, d_n = 1;
  std::string d_kind = "nodal";
  auto* dual = app.add_subcommand("dual", "mass matrix and dual/primal pairings");
  dual->add_option("--p", d_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  dual->add_option("--elements", d_n, "number of elements")->check(CLI::Range(1, 100000))->capture_default_str();
  dual->add_option("--kind", d_kind, "nodal (dual of the nodal DOFs, paired with edge functions) or edge")
      ->check(CLI::IsMember({"nodal", "edge"}))
      ->capture_default_str();
  add_common(dual, c_dual);
  dual->callback([&] {
    command = "dual";
    action = [&] {
      BasisFamily fam(Mesh1D(0.0, 1.0, d_n, d_p));
      const DualKind kind = d_kind == "nodal" ? DualKind::DualNodal : DualKind::DualEdge;
      DualSet ds(fam, kind);
      const int n = ds.size();
      const QuadratureRule rule = QuadratureRule::gauss_legendre(d_p + 2);
      Eigen::MatrixXd pairing = Eigen::MatrixXd::Zero(n, n);
      for_each_quad_point(fam.mesh(), rule, {}, [&](int e, double x, double w) {
        for (int i = 0; i < n; ++i) {
          const double di = ds.eval_in(i, e, x);
          for (int j = 0; j < n; ++j)
            pairing(i, j) += w * di * (kind == DualKind::DualNodal ? fam.edge(j, x) : fam.nodal(j, x));
        }
      });
      Table t;
      t.columns = {"i", "j", "mass", "pairing"};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.add({double(i), double(j), ds.mass().entries()(i, j), pairing(i, j)});
      drv.emit(std::move(t), c_dual, command);
    };
  });

  // project
  Common c_proj;
  std::string pr_case = "sin2pix", pr_flavor = "h10";
  int pr_p = 2, pr_n = 5, pr_grid = 401;
  double pr_c = 1.0, pr_nu = 0.01;
  bool pr_source = false;
  auto* proj = app.add_subcommand("project", "L2 or H10 projection of a named case");
  proj->add_option("--case", pr_case, "sin2pix or advdiff-const")
      ->check(CLI::IsMember({"sin2pix", "advdiff-const"}))
      ->capture_default_str();
  proj->add_option("--projection", pr_flavor, "l2 or h10")->check(CLI::IsMember({"l2", "h10"}))->capture_default_str();
  proj->add_option("--p", pr_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  proj->add_option("--elements", pr_n, "number of elements")->check(CLI::Range(1, 100000))->capture_default_str();
  proj->add_option("--grid", pr_grid, "sample points")->check(CLI::Range(2, 10000000))->capture_default_str();
  proj->add_option("--c", pr_c, "advection speed")->capture_default_str();
  proj->add_option("--nu", pr_nu, "diffusion")->check(CLI::PositiveNumber)->capture_default_str();
  proj->add_flag("--source", pr_source, "H10 coefficients from int mu f (sin2pix only)");
  add_common(proj, c_proj);
  proj->callback([&] {
    command = "project";
    action = [&] {
      BasisFamily fam(Mesh1D(0.0, 1.0, pr_n, pr_p));
      const Flavor fl = parse_flavor(pr_flavor);
      MuSet mu(fam, fl);
      const QuadratureRule rule = QuadratureRule::gauss_legendre(quad_points());
      Function1D u;
      Field ub;
      if (pr_case == "sin2pix") {
        const PoissonCase1D pc = sin2pix();
        u = pc.solution;
        if (pr_source && fl != Flavor::H10) throw InputError("--source applies to the h10 projection only");
        ub = pr_source ? h10_project_from_source(mu, pc.source, rule) : project(mu, u, rule);
      } else {
        if (pr_source) throw InputError("--source applies to sin2pix only");
        u = advdiff_const(pr_c, pr_nu).solution;
        ub = project(mu, u, rule);
      }
      Table t;
      t.columns = {"x", "u_exact", "u_bar"};
      for (double x : linspace(pr_grid)) t.add({x, u.value(x), fam.eval(ub, x)});
      drv.emit(std::move(t), c_proj, command);
    };
  });

  // greens
  Common c_gr;
  std::string g_kernel = "poisson";
  int g_grid = 41;
  double g_c = 1.0, g_nu = 0.01;
  auto* greens = app.add_subcommand("greens", "sample a 1D Green's function");
  greens->add_option("--kernel", g_kernel, "poisson or advdiff")
      ->check(CLI::IsMember({"poisson", "advdiff"}))
      ->capture_default_str();
  greens->add_option("--grid", g_grid, "points per direction")->check(CLI::Range(2, 100000))->capture_default_str();
  greens->add_option("--c", g_c, "advection speed")->capture_default_str();
  greens->add_option("--nu", g_nu, "diffusion")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(greens, c_gr);
  greens->callback([&] {
    command = "greens";
    action = [&] {
      const GreensKernel1D k =
          g_kernel == "poisson" ? GreensKernel1D::poisson() : GreensKernel1D::advection_diffusion(g_c, g_nu, 1.0);
      Table t;
      t.columns = {"x", "s", "g"};
      const auto grid = linspace(g_grid);
      for (double x : grid)
        for (double s : grid) t.add({x, s, k.value(x, s)});
      drv.emit(std::move(t), c_gr, command);
    };
  });

  // finescale
  Common c_fs;
  std::string fs_flavor = "h10", fs_kernel = "poisson";
  int fs_p = 2, fs_n = 2, fs_grid = 41;
  double fs_c = 1.0, fs_nu = 0.01;
  bool fs_naive = false;
  auto* fine = app.add_subcommand("finescale", "sample the fine-scale Green's function");
  fine->add_option("--projection", fs_flavor, "l2 or h10")->check(CLI::IsMember({"l2", "h10"}))->capture_default_str();
  fine->add_option("--kernel", fs_kernel, "poisson or advdiff")
      ->check(CLI::IsMember({"poisson", "advdiff"}))
      ->capture_default_str();
  fine->add_option("--p", fs_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  fine->add_option("--elements", fs_n, "number of elements")->check(CLI::Range(1, 100000))->capture_default_str();
  fine->add_option("--grid", fs_grid, "points per direction")->check(CLI::Range(2, 100000))->capture_default_str();
  fine->add_option("--c", fs_c, "advection speed")->capture_default_str();
  fine->add_option("--nu", fs_nu, "diffusion")->check(CLI::PositiveNumber)->capture_default_str();
  fine->add_flag("--naive", fs_naive, "do not split integrals at the source point");
  add_common(fine, c_fs);
  fine->callback([&] {
    command = "finescale";
    action = [&] {
      BasisFamily fam(Mesh1D(0.0, 1.0, fs_n, fs_p));
      const GreensKernel1D k = fs_kernel == "poisson" ? GreensKernel1D::poisson()
                                                      : GreensKernel1D::advection_diffusion(fs_c, fs_nu, 1.0);
      FineScaleConfig cfg;
      cfg.quad_points = quad_points();
      FineScaleOperator op(k, MuSet(fam, parse_flavor(fs_flavor)), cfg);
      const KinkHandling kh = fs_naive ? KinkHandling::Naive : KinkHandling::Split;
      const auto grid = linspace(fs_grid);
      std::vector<std::vector<double>> cols;
      for (double s : grid) cols.push_back(op.eval_column(grid, s, kh));
      Table t;
      t.columns = {"x", "s", "g", "g_prime"};
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j) t.add({grid[i], grid[j], k.value(grid[i], grid[j]), cols[j][i]});
      drv.emit(std::move(t), c_fs, command);
    };
  });

  // reconstruct
  Common c_rec;
  std::string r_case = "sin2pix", r_flavor = "h10";
  int r_p = 2, r_n = 5, r_grid = 401;
  double r_c = 1.0, r_nu = 0.01;
  auto* rec = app.add_subcommand("reconstruct", "projection plus reconstructed fine scales of a named case");
  rec->add_option("--case", r_case, "sin2pix, or advdiff-const (exact-gradient residual)")
      ->check(CLI::IsMember({"sin2pix", "advdiff-const"}))
      ->capture_default_str();
  rec->add_option("--projection", r_flavor, "l2 or h10")->check(CLI::IsMember({"l2", "h10"}))->capture_default_str();
  rec->add_option("--p", r_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  rec->add_option("--elements", r_n, "number of elements")->check(CLI::Range(1, 100000))->capture_default_str();
  rec->add_option("--grid", r_grid, "sample points")->check(CLI::Range(2, 10000000))->capture_default_str();
  rec->add_option("--c", r_c, "advection speed")->capture_default_str();
  rec->add_option("--nu", r_nu, "diffusion")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(rec, c_rec);
  rec->callback([&] {
    command = "reconstruct";
    action = [&] {
      BasisFamily fam(Mesh1D(0.0, 1.0, r_n, r_p));
      const Flavor fl = parse_flavor(r_flavor);
      FineScaleConfig cfg;
      cfg.quad_points = quad_points();
      const auto grid = linspace(r_grid);
      Function1D u;
      Field ub;
      std::vector<double> up;
      if (r_case == "sin2pix") {
        const PoissonCase1D pc = sin2pix();
        u = pc.solution;
        MuSet mu(fam, fl);
        const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);
        ub = fl == Flavor::H10 ? h10_project_from_source(mu, pc.source, rule) : project(mu, u, rule);
        FineScaleOperator op(GreensKernel1D::poisson(), std::move(mu), cfg);
        up = op.reconstruct(from_function(pc.source) + second_derivative(fam, ub), grid);
      } else {
        const AdvDiffCase ac = advdiff_const(r_c, r_nu);
        u = ac.solution;
        auto res = exact_gradient_reconstruction(ac.problem, u, fam, fl, grid, cfg);
        ub = std::move(res.u_bar);
        up = std::move(res.u_prime);
      }
      Table t;
      t.columns = {"x", "u_exact", "u_bar", "u_prime", "u_sum"};
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double b = fam.eval(ub, grid[k]);
        t.add({grid[k], u.value(grid[k]), b, up[k], b + up[k]});
      }
      drv.emit(std::move(t), c_rec, command);
    };
  });

  // vms-iter
  Common c_vms;
  double v_c = 1.0, v_nu = 0.01, v_w = 0.0, v_eps = 1e-8;
  int v_p = 2, v_n = 3, v_max = 100000, v_cells = 2000, v_grid = 401;
  std::string v_history;
  bool v_require = false;
  auto* vms = app.add_subcommand("vms-iter", "coupled coarse/fine iteration for advection-diffusion with f = 1");
  vms->add_option("--c", v_c, "advection speed")->capture_default_str();
  vms->add_option("--nu", v_nu, "diffusion")->check(CLI::PositiveNumber)->capture_default_str();
  vms->add_option("--p", v_p, "degree")->check(CLI::Range(1, 64))->capture_default_str();
  vms->add_option("--elements", v_n, "number of elements")->check(CLI::Range(1, 100000))->capture_default_str();
  vms->add_option("--w", v_w, "relaxation factor in (0, 1]; 0 selects 1/(2 alpha)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  vms->add_option("--eps", v_eps, "stopping tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  vms->add_option("--max-iter", v_max, "iteration cap")->check(CLI::Range(1, 100000000))->capture_default_str();
  vms->add_option("--fine-cells", v_cells, "cells of the fine grid")
      ->check(CLI::Range(1, 10000000))
      ->capture_default_str();
  vms->add_option("--grid", v_grid, "sample points")->check(CLI::Range(2, 10000000))->capture_default_str();
  vms->add_option("--history", v_history, "file for the increment history");
  vms->add_flag("--require-convergence", v_require, "exit 1 when the iteration cap is reached");
  add_common(vms, c_vms);
  vms->callback([&] {
    command = "vms-iter";
    action = [&] {
      const AdvDiffCase ac = advdiff_const(v_c, v_nu);
      BasisFamily fam(Mesh1D(0.0, 1.0, v_n, v_p));
      VmsSettings s;
      s.w = v_w;
      s.eps = v_eps;
      s.max_iter = v_max;
      s.fine_cells = v_cells;
      s.fine.quad_points = quad_points();
      VmsIteration it(ac.problem, fam, s);
      const IterationState st = it.run();
      const Field direct = project(it.mu(), ac.solution, QuadratureRule::gauss_legendre(s.fine.quad_points));
      const Field gal = galerkin_solve(ac.problem, fam);
      Table t;
      t.meta = {{"relaxation", str(it.relaxation())},
                {"iterations", std::to_string(st.iterations)},
                {"converged", st.converged ? "true" : "false"}};
      t.columns = {"x", "u_bar", "u_prime", "u_exact", "u_bar_direct", "u_galerkin"};
      for (double x : linspace(v_grid))
        t.add({x, fam.eval(st.u_bar, x), st.u_prime.value(x), ac.solution.value(x), fam.eval(direct, x),
               fam.eval(gal, x)});
      drv.emit(t, c_vms, command);
      if (!v_history.empty()) {
        Table h;
        h.meta = t.meta;
        h.columns = {"iteration", "increment"};
        for (std::size_t k = 0; k < st.history.size(); ++k) h.add({double(k + 1), st.history[k]});
        Common hc{v_history, c_vms.format};
        drv.emit(std::move(h), hc, command);
      }
      if (v_require && !st.converged)
        throw NumericalDefect("vms-iter: no convergence after " + std::to_string(st.iterations) + " iterations");
    };
  });

  // poisson2d
  Common c_2d;
  std::string p2_case = "sin2pixy";
  int p2_p = 3, p2_n = 2, p2_terms = kDefaultSeriesTerms, p2_grid = 41;
  auto* p2 = app.add_subcommand("poisson2d", "2D H10 projection and fine-scale reconstruction");
  p2->add_option("--case", p2_case, "sin2pixy")->check(CLI::IsMember({"sin2pixy"}))->capture_default_str();
  p2->add_option("--p", p2_p, "degree")->check(CLI::Range(1, 16))->capture_default_str();
  p2->add_option("--elements", p2_n, "elements per direction")->check(CLI::Range(1, 64))->capture_default_str();
  p2->add_option("--terms", p2_terms, "series terms")->check(CLI::Range(1, 2000))->capture_default_str();
  p2->add_option("--grid", p2_grid, "points per direction")->check(CLI::Range(2, 2001))->capture_default_str();
  add_common(p2, c_2d);
  p2->callback([&] {
    command = "poisson2d";
    action = [&] {
      const PoissonCase2D pc = sin2pixy();
      MuSet2D mu{Mesh2D(p2_n, p2_p)};
      const Field2D ub = project_2d(mu, pc.solution);
      FineScale2DConfig cfg;
      cfg.num_terms = p2_terms;
      FineScale2D fs(mu, cfg);
      const auto grid = linspace(p2_grid);
      const Reconstruction2D r = fs.reconstruct(pc.source, ub, grid, grid);
      Table t;
      t.columns = {"x", "y", "u_bar", "u_prime", "u_exact"};
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j)
          t.add({grid[i], grid[j], eval(mu.mesh(), ub, grid[i], grid[j]), r.u_prime(i, j),
                 pc.solution.value(grid[i], grid[j])});
      drv.emit(std::move(t), c_2d, command);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fsg: " << e.what() << "\n";
    return 2;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) drv.flags = collect_flags(sub);
    if (action) action();
  } catch (const InputError& e) {
    err << "fsg: input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalDefect& e) {
    err << "fsg: numerical defect: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "fsg: numerical defect: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fsg::cli
