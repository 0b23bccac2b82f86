// Command-line surface for the L2-Betti number library: deterministic
// reports, exact-rational closed forms, and the spectral estimators.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "l2betti/buildings.hpp"
#include "l2betti/complex_invariants.hpp"
#include "l2betti/description_io.hpp"
#include "l2betti/errors.hpp"
#include "l2betti/graph_invariants.hpp"
#include "l2betti/report.hpp"
#include "l2betti/selftest.hpp"

using namespace l2betti;

namespace {

struct OutputOptions {
  std::string format = "csv";
  std::string out_path;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "csv or table")->check(CLI::IsMember({"csv", "table"}));
  cmd->add_option("--out", out.out_path, "write the report here instead of stdout");
}

void emit_report(const OutputOptions& out, const std::vector<LedgerRow>& rows,
                 const std::vector<std::string>& summary) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.out_path.empty()) {
    file.open(out.out_path);
    if (!file) throw ValidationError("cannot write " + out.out_path);
    os = &file;
  }
  if (out.format == "table")
    write_table(*os, rows);
  else
    write_csv(*os, rows);
  for (const std::string& line : summary) *os << line << '\n';
}

OrbitGraph load_graph(const std::string& path) {
  Description d = parse_description_file(path);
  if (auto* g = std::get_if<OrbitGraph>(&d)) return *g;
  throw ValidationError(path + ": expected a graph description");
}

CofiniteComplex load_complex(const std::string& path) {
  Description d = parse_description_file(path);
  if (auto* c = std::get_if<CofiniteComplex>(&d)) return *c;
  return complex_of_graph(std::get<OrbitGraph>(d));
}

std::vector<Rational> parse_sequence(std::string text) {
  std::erase_if(text, [](char c) { return c == '(' || c == ')' || c == ' '; });
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_fraction(item));
  return out;
}

std::string sequence_string(const std::vector<Rational>& seq) {
  std::string out = "(";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ",";
    out += fraction_string(seq[i]);
  }
  return out + ")";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"L2-Betti numbers of weighted graphs and cofinite complexes"};
  app.require_subcommand(1);

  SpectralOptions spectral;
  std::string haar_scale_text = "1";
  app.add_option("--threads", spectral.threads, "parallel truncation levels")->capture_default_str();
  app.add_option("--dense-cap", spectral.dense_cap, "dense eigensolver cell cap")
      ->capture_default_str();
  app.add_option("--haar-scale", haar_scale_text,
                 "multiply all stabilizer measures by this rational");

  // beta0 -------------------------------------------------------------------
  auto* cmd_beta0 = app.add_subcommand("beta0", "zeroth L2-Betti number");
  std::string beta0_file;
  std::vector<int> beta0_radii{2, 4, 8};
  OutputOptions beta0_out;
  cmd_beta0->add_option("file", beta0_file)->required();
  cmd_beta0->add_option("--radii", beta0_radii)->delimiter(',');
  add_output_flags(cmd_beta0, beta0_out);

  // beta1-graph ---------------------------------------------------------------
  auto* cmd_beta1 = app.add_subcommand("beta1-graph", "first L2-Betti number of a graph");
  std::string beta1_file;
  std::vector<int> beta1_radii{2, 3, 4, 5, 6};
  std::vector<double> beta1_eps = default_epsilon_schedule();
  OutputOptions beta1_out;
  cmd_beta1->add_option("file", beta1_file)->required();
  cmd_beta1->add_option("--radii", beta1_radii)->delimiter(',');
  cmd_beta1->add_option("--eps", beta1_eps)->delimiter(',');
  add_output_flags(cmd_beta1, beta1_out);

  // tree ----------------------------------------------------------------------
  auto* cmd_tree = app.add_subcommand("tree", "closed form for infinite trees");
  std::string tree_file;
  cmd_tree->add_option("file", tree_file)->required();

  // betti-complex -------------------------------------------------------------
  auto* cmd_complex = app.add_subcommand("betti-complex", "L2-Betti numbers of a cofinite complex");
  std::string complex_file, product_file;
  std::vector<int> complex_levels{1, 2, 3};
  std::vector<double> complex_eps = default_epsilon_schedule();
  int complex_degree = -1;  // -1: all degrees
  OutputOptions complex_out;
  cmd_complex->add_option("file", complex_file)->required();
  cmd_complex->add_option("--product", product_file, "take the cell product with this complex");
  cmd_complex->add_option("--levels", complex_levels)->delimiter(',');
  cmd_complex->add_option("--eps", complex_eps)->delimiter(',');
  cmd_complex->add_option("--degree", complex_degree, "-1 runs every degree");
  add_output_flags(cmd_complex, complex_out);

  // folner ----------------------------------------------------------------------
  auto* cmd_folner = app.add_subcommand("folner", "Folner-quotient estimator");
  std::string folner_file;
  std::vector<int> folner_ks{2, 4, 6, 8, 10};
  int folner_degree = 1;
  OutputOptions folner_out;
  cmd_folner->add_option("file", folner_file)->required();
  cmd_folner->add_option("--ks", folner_ks)->delimiter(',');
  cmd_folner->add_option("--degree", folner_degree);
  add_output_flags(cmd_folner, folner_out);

  // lueck ---------------------------------------------------------------------
  auto* cmd_lueck = app.add_subcommand("lueck", "finite-quotient approximation sequence");
  int lueck_cycles = 8;
  int lueck_degree = 1;
  std::vector<std::string> lueck_files;
  std::vector<long> lueck_indices;
  cmd_lueck->add_option("--cycles", lueck_cycles, "use cycle graphs C_3..C_m with index m");
  cmd_lueck->add_option("--degree", lueck_degree);
  cmd_lueck->add_option("--files", lueck_files)->delimiter(',');
  cmd_lueck->add_option("--indices", lueck_indices)->delimiter(',');

  // kunneth -------------------------------------------------------------------
  auto* cmd_kunneth = app.add_subcommand("kunneth", "convolution of Betti sequences");
  std::vector<std::string> kunneth_seqs;
  cmd_kunneth->add_option("sequences", kunneth_seqs)->expected(2);

  // euler ---------------------------------------------------------------------
  auto* cmd_euler = app.add_subcommand("euler", "Euler-characteristic consistency");
  std::string euler_file;
  std::vector<int> euler_levels{2, 4};
  std::vector<double> euler_eps = default_epsilon_schedule();
  cmd_euler->add_option("file", euler_file)->required();
  cmd_euler->add_option("--levels", euler_levels)->delimiter(',');
  cmd_euler->add_option("--eps", euler_eps)->delimiter(',');

  // building ------------------------------------------------------------------
  auto* cmd_building = app.add_subcommand("building", "BN-pair top-degree lower bound");
  int building_rank = 1;
  long building_q = 2;
  std::vector<std::string> building_splits;
  std::string building_covolume;
  cmd_building->add_option("--rank", building_rank)->required();
  cmd_building->add_option("--q", building_q)->required();
  cmd_building->add_option("--splits", building_splits)->delimiter(',');
  cmd_building->add_option("--covolume", building_covolume, "rescale to a lattice of this covolume");

  // selftest ------------------------------------------------------------------
  auto* cmd_selftest = app.add_subcommand("selftest", "dimension-axiom and closed-form battery");
  SelftestOptions selftest_opts;
  cmd_selftest->add_option("--seed", selftest_opts.seed)->capture_default_str();
  cmd_selftest->add_option("--trials", selftest_opts.trials)->capture_default_str();
  cmd_selftest->add_flag("--inject-failure", selftest_opts.inject_failure);

  CLI11_PARSE(app, argc, argv);

  try {
    const Rational haar_scale = parse_fraction(haar_scale_text);
    if (haar_scale <= 0) throw ComputationError("invalid-scale");

    if (cmd_beta0->parsed()) {
      OrbitGraph g = load_graph(beta0_file);
      g.haar_scale *= haar_scale;
      const BettiEstimate est = beta0_graph(g, beta0_radii);
      std::vector<std::string> summary;
      if (est.kind == BettiEstimate::Kind::Point) {
        const Rational exact =
            Rational(1) / g.ball(64).skeleton_mass(0);
        summary.push_back("beta0 " + fraction_string(exact) + " = " + format_value(est.value));
      } else {
        summary.push_back("beta0 " + format_value(est.lo) + " " + format_value(est.hi));
      }
      emit_report(beta0_out, est.table, summary);
      return 0;
    }

    if (cmd_beta1->parsed()) {
      OrbitGraph g = load_graph(beta1_file);
      g.haar_scale *= haar_scale;
      const BettiEstimate est = beta1_graph(g, beta1_radii, beta1_eps, spectral);
      emit_report(beta1_out, est.table,
                  {"beta1 " + format_value(est.lo) + " " + format_value(est.hi)});
      return 0;
    }

    if (cmd_tree->parsed()) {
      OrbitGraph g = load_graph(tree_file);
      g.haar_scale *= haar_scale;
      const Rational v = beta1_tree_closed_form(g);
      std::cout << fraction_string(v) << '\n'
                << "decimal " << format_value(to_double(v)) << '\n';
      return 0;
    }

    if (cmd_complex->parsed()) {
      CofiniteComplex c = load_complex(complex_file);
      if (!product_file.empty()) c = product_complex(c, load_complex(product_file));
      c.haar_scale *= haar_scale;
      std::vector<int> degrees;
      if (complex_degree >= 0)
        degrees = {complex_degree};
      else
        for (int n = 0; n <= c.dims; ++n) degrees.push_back(n);
      std::vector<LedgerRow> rows;
      std::vector<std::string> summary;
      for (int n : degrees) {
        const BettiEstimate est = betti_cofinite(c, n, complex_levels, complex_eps, spectral);
        rows.insert(rows.end(), est.table.begin(), est.table.end());
        if (est.kind == BettiEstimate::Kind::Point)
          summary.push_back("betti " + std::to_string(n) + " " + format_value(est.value));
        else
          summary.push_back("betti " + std::to_string(n) + " " + format_value(est.lo) + " " +
                            format_value(est.hi));
      }
      emit_report(complex_out, rows, summary);
      return 0;
    }

    if (cmd_folner->parsed()) {
      CofiniteComplex c = load_complex(folner_file);
      c.haar_scale *= haar_scale;
      const FolnerResult res = folner_limit(c, folner_degree, folner_ks);
      std::vector<LedgerRow> rows;
      std::vector<std::string> summary;
      for (const FolnerEntry& e : res.entries) {
        rows.push_back({folner_degree, e.k, e.k, 0.0, to_double(e.value), "point"});
        summary.push_back("folner k=" + std::to_string(e.k) + " value " +
                          fraction_string(e.value) + " quality " + fraction_string(e.quality));
      }
      summary.push_back("folner-limit " + fraction_string(res.last_value));
      emit_report(folner_out, rows, summary);
      return 0;
    }

    if (cmd_lueck->parsed()) {
      std::vector<std::pair<CofiniteComplex, long>> quotients;
      if (!lueck_files.empty()) {
        if (lueck_files.size() != lueck_indices.size())
          throw ValidationError("need one index per quotient file");
        for (std::size_t i = 0; i < lueck_files.size(); ++i)
          quotients.push_back({load_complex(lueck_files[i]), lueck_indices[i]});
      } else {
        for (int m = 3; m <= lueck_cycles; ++m)
          quotients.push_back({make_finite_cycle_complex(m), m});
      }
      const auto seq = lueck_quotient_limit(quotients, lueck_degree);
      for (std::size_t i = 0; i < seq.size(); ++i)
        std::cout << "lueck index=" << quotients[i].second << " value "
                  << fraction_string(seq[i]) << '\n';
      return 0;
    }

    if (cmd_kunneth->parsed()) {
      const auto seq =
          kunneth(parse_sequence(kunneth_seqs[0]), parse_sequence(kunneth_seqs[1]));
      std::cout << sequence_string(seq) << '\n';
      return 0;
    }

    if (cmd_euler->parsed()) {
      CofiniteComplex c = load_complex(euler_file);
      c.haar_scale *= haar_scale;
      const Rational chi = c.euler_weight_sum();
      if (c.is_finite()) {
        const bool ok = euler_check(c, finite_betti_numbers(c));
        std::cout << "euler " << (ok ? "ok" : "mismatch") << " chi " << fraction_string(chi)
                  << " (exact)\n";
        return ok ? 0 : 2;
      }
      if (const auto exact = c.exact_betti()) {
        const bool ok = euler_check(c, *exact);
        std::cout << "euler " << (ok ? "ok" : "mismatch") << " chi " << fraction_string(chi)
                  << " (exact)\n";
        return ok ? 0 : 2;
      }
      std::vector<BettiEstimate> estimates;
      for (int n = 0; n <= c.dims; ++n)
        estimates.push_back(betti_cofinite(c, n, euler_levels, euler_eps, spectral));
      const bool ok = euler_check_numeric(c, estimates);
      std::cout << "euler " << (ok ? "ok" : "mismatch") << " chi " << fraction_string(chi)
                << " (bracketed)\n";
      return ok ? 0 : 2;
    }

    if (cmd_building->parsed()) {
      ChamberData cd;
      cd.rank = building_rank;
      cd.q = building_q;
      for (const std::string& s : building_splits) cd.panel_splits.push_back(parse_fraction(s));
      Rational bound = top_degree_lower_bound(cd);
      bound = bound / haar_scale;
      if (!building_covolume.empty())
        bound = lattice_rescale(bound, parse_fraction(building_covolume));
      std::cout << fraction_string(bound) << '\n'
                << "decimal " << format_value(to_double(bound)) << '\n'
                << "positive " << (bound > 0 ? "yes" : "no") << '\n';
      return 0;
    }

    if (cmd_selftest->parsed()) {
      const SelftestReport report = run_selftest(selftest_opts);
      write_selftest_report(std::cout, report);
      return report.all_passed() ? 0 : 3;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ComputationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
