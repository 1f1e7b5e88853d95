// Command-line front end: game files, LP files, equilibria, heuristics,
// lookahead inspection, commitment solves, reduction gadgets and noise sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "lla/commitment.hpp"
#include "lla/equilibrium.hpp"
#include "lla/experiments.hpp"
#include "lla/game_io.hpp"
#include "lla/optim/branch_and_bound.hpp"
#include "lla/optim/lp_format.hpp"
#include "lla/poker.hpp"
#include "lla/random_game.hpp"
#include "lla/reductions.hpp"
#include "lla/table_io.hpp"

namespace {

using namespace lla;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f.flush()) throw std::runtime_error("cannot write " + path);
}

// A game file, or one of the built-in poker games: kuhn, kj, with ":2" to
// seat the rational player second.
GameTree load_any(const std::string& what) {
  if (!std::filesystem::exists(what)) {
    const auto colon = what.find(':');
    const std::string name = what.substr(0, colon);
    int seat = 1;
    if (colon != std::string::npos) {
      const std::string s = what.substr(colon + 1);
      if (s != "1" && s != "2") throw std::runtime_error("seat must be 1 or 2 in '" + what + "'");
      seat = s[0] - '0';
    }
    if (name == "kuhn") return build_kuhn(seat);
    if (name == "kj") return build_kj(seat);
  }
  return load_game_file(what);
}

std::string fmt(double v) { return detail::fmt_double(v); }

int game_validate(const std::string& path) {
  GameTree g;
  try {
    g = parse_game(read_file(path));
  } catch (const GameFormatError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return 1;
  }
  const auto violations = validate(g);
  for (const auto& v : violations) std::cout << to_string(v.kind) << ": " << v.message << '\n';
  if (violations.empty()) std::cout << "ok\n";
  return violations.empty() ? 0 : 1;
}

int game_stats(const std::string& what) {
  const auto s = stats(load_any(what));
  std::cout << "nodes," << s.nodes << "\nleaves," << s.leaves << "\ninfosets_r," << s.infosets_r
            << "\ninfosets_l," << s.infosets_l << "\nsequences_r," << s.sequences_r
            << "\nsequences_l," << s.sequences_l << "\ndepth," << s.depth << '\n';
  return 0;
}

int opt_solve(const std::string& path) {
  const auto p = optim::parse_lp(read_file(path));
  bool mip = false;
  for (const auto& v : p.variables()) mip = mip || v.kind == optim::VarKind::kBinary;
  const auto sol = mip ? optim::solve_mip(p) : optim::solve_lp(p);
  std::cout << "status," << optim::to_string(sol.status) << '\n';
  if (!sol.optimal() && sol.primal.empty()) return 2;
  std::cout << "objective," << fmt(sol.objective) << "\nvariable,value\n";
  for (int j = 0; j < p.num_vars(); ++j) std::cout << p.variable(j).name << ',' << fmt(sol.primal[j]) << '\n';
  return sol.optimal() ? 0 : 2;
}

int equilibrium(const std::string& what) {
  const GameTree g = load_any(what);
  const auto eq = solve_zero_sum(g);
  std::cout << "game_value," << fmt(eq.game_value) << '\n';
  std::cout << "exploitability," << fmt(exploitability(g, eq.plan_r, eq.plan_l)) << '\n';
  std::cout << "# r plan\n" << plan_csv(g, eq.plan_r);
  std::cout << "# l plan\n" << plan_csv(g, eq.plan_l);
  return 0;
}

EvaluationFunction exact_heuristic(const GameTree& g) { return make_heuristic_exact(g, solve_zero_sum(g)); }

// "exact" or a node,value CSV file.
EvaluationFunction heuristic_from(const GameTree& g, const std::string& source) {
  if (source == "exact") return exact_heuristic(g);
  return parse_heuristic_csv(g, read_file(source));
}

int heuristic(const std::string& what, const std::string& model, double gamma, std::uint64_t seed) {
  const GameTree g = load_any(what);
  EvaluationFunction h = exact_heuristic(g);
  if (model != "exact") h = make_heuristic_noisy(g, h, parse_noise_model(model), gamma, seed);
  std::cout << heuristic_csv(h);
  return 0;
}

int lookahead_inspect(const std::string& what, int k, const std::string& hfile,
                      const std::string& planfile) {
  const GameTree g = load_any(what);
  const EvaluationFunction h = heuristic_from(g, hfile.empty() ? "exact" : hfile);
  const RealizationPlan x = planfile.empty() ? uniform_plan(g, Player::kRational)
                                             : parse_plan_csv(g, Player::kRational, read_file(planfile));
  LookaheadSpec spec;
  spec.k = k;
  spec.h = h;
  spec.check(g);
  const LookaheadModel model(g, k);
  std::cout << "infoset,reach,action,label,value,optimal,frontier\n";
  for (int i : g.infosets_of(Player::kLimited)) {
    const auto as = optimal_actions(g, model, h, x, i);
    for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
      std::cout << i << ',' << fmt(as.reach) << ',' << a << ',' << g.infoset(i).labels[a] << ','
                << fmt(as.values[a]) << ',' << (as.optimal[a] ? 1 : 0) << ','
                << model.frontier(i, a).nodes.size() << '\n';
    }
  }
  return 0;
}

struct CommitArgs {
  std::string game, tie = "adv", heuristic = "exact", export_lp;
  int k = 1;
  bool oracle = false;
  long node_cap = 1'000'000;
  double eps = 1e-6;
};

int commit(const CommitArgs& a) {
  const GameTree g = load_any(a.game);
  LookaheadSpec spec;
  spec.k = a.k;
  spec.tie = parse_tie_break(a.tie);
  spec.h = heuristic_from(g, a.heuristic);
  CommitOptions opt;
  opt.eps = a.eps;
  opt.mip.max_nodes = a.node_cap;
  if (!a.export_lp.empty()) write_file(a.export_lp, optim::export_lp(build_commitment_mip(g, spec, opt).problem));
  const auto res = a.oracle ? enumerate_structures_oracle(g, spec, opt) : solve_commitment(g, spec, opt);
  std::cout << "status," << optim::to_string(res.status) << '\n';
  if (!res.ok() || res.plan_r.values.empty()) return 2;
  std::cout << "value," << fmt(res.value_r) << "\ntie," << to_string(res.tie) << '\n';
  if (a.oracle) {
    std::cout << "structures," << res.structures << "\nfeasible_structures," << res.feasible_structures
              << "\nmax_duality_gap," << fmt(res.max_duality_gap) << '\n';
  } else {
    std::cout << "rows," << res.rows << "\ncols," << res.cols << "\nbinaries," << res.binaries
              << "\nnonzeros," << res.nonzeros << "\nnodes," << res.nodes << '\n';
  }
  std::cout << "ms," << fmt(res.wall_ms) << '\n';
  std::cout << "# r plan\n" << plan_csv(g, res.plan_r);
  std::cout << "# l response\n" << plan_csv(g, res.plan_l);
  std::cout << "# induced structure\ninfoset,optimal_actions\n";
  for (int i : g.infosets_of(Player::kLimited)) {
    if (!res.induced.reached(i)) continue;
    std::cout << i << ',';
    bool first = true;
    for (int b = 0; b < g.infoset(i).num_actions(); ++b) {
      if (!res.induced.active[i][b]) continue;
      std::cout << (first ? "" : " ") << g.infoset(i).labels[b];
      first = false;
    }
    std::cout << '\n';
  }
  return res.status == optim::SolveStatus::kOptimal ? 0 : 2;
}

int gen_reduction(int kind, const std::string& cnf_path, const std::string& out, const std::string& hout) {
  const Gadget gd = make_gadget(kind, parse_dimacs(read_file(cnf_path)));
  write_file(out, save_game(gd.game));
  if (!hout.empty()) write_file(hout, heuristic_csv(gd.spec.h));
  std::cout << "k," << gd.spec.k << "\ntie," << to_string(gd.spec.tie) << "\nnodes," << gd.game.num_nodes() << '\n';
  return 0;
}

int gen_game(const std::string& kind, int seat, std::uint64_t seed, const std::string& out) {
  GameTree g;
  if (kind == "kuhn") {
    g = build_kuhn(seat);
  } else if (kind == "kj") {
    g = build_kj(seat);
  } else if (kind == "random") {
    g = random_game(seed);
  } else {
    throw std::runtime_error("unknown game kind '" + kind + "' (kuhn, kj or random)");
  }
  write_file(out, save_game(g));
  return 0;
}

int experiment_run(const std::string& config, const std::string& out, int threads) {
  ExperimentGrid grid = parse_grid_config(read_file(config));
  if (threads > 0) grid.threads = threads;
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << kRowsHeader << '\n' << std::flush;
  long rows = 0, failed = 0;
  run_grid(grid, [&](const ResultRow& r) {
    f << format_row(r) << '\n' << std::flush;
    ++rows;
    failed += r.status != "optimal";
  });
  std::cerr << rows << " rows, " << failed << " not optimal\n";
  return 0;
}

int experiment_summarize(const std::string& rows, const std::string& out, bool trend) {
  const auto summary = summarize(parse_rows_csv(read_file(rows)));
  const std::string csv = summary_csv(summary);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  if (!trend) return 0;
  bool ok = true;
  for (const auto& t : check_trend(summary)) {
    if (t.ok) continue;
    ok = false;
    std::cerr << "trend: " << t.game << " rational=" << t.rational << " k=" << t.k << ' ' << t.model
              << " mean " << fmt(t.mean_from) << " at gamma " << t.gamma_from << " drops to "
              << fmt(t.mean_to) << " at gamma " << t.gamma_to << " (allowed " << fmt(t.allowed) << ")\n";
  }
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal commitment against limited-lookahead opponents"};
  app.require_subcommand(1);
  int rc = 0;

  auto* game = app.add_subcommand("game", "Inspect game files")->require_subcommand(1);
  std::string game_file;
  auto* validate_cmd = game->add_subcommand("validate", "Check a game file");
  validate_cmd->add_option("file", game_file)->required();
  validate_cmd->callback([&] { rc = game_validate(game_file); });
  auto* stats_cmd = game->add_subcommand("stats", "Node and sequence counts");
  stats_cmd->add_option("game", game_file, "game file, kuhn, kj, kuhn:2 or kj:2")->required();
  stats_cmd->callback([&] { rc = game_stats(game_file); });

  auto* opt = app.add_subcommand("opt", "LP/MIP files")->require_subcommand(1);
  std::string lp_file;
  auto* solve_cmd = opt->add_subcommand("solve", "Solve an LP-format file");
  solve_cmd->add_option("file", lp_file)->required();
  solve_cmd->callback([&] { rc = opt_solve(lp_file); });

  auto* eq = app.add_subcommand("equilibrium", "Zero-sum equilibrium value and plans");
  eq->add_option("game", game_file)->required();
  eq->callback([&] { rc = equilibrium(game_file); });

  std::string model = "exact";
  double gamma = 0.0;
  std::uint64_t seed = 0;
  auto* heur = app.add_subcommand("heuristic", "Dump node values of an evaluation function");
  heur->add_option("game", game_file)->required();
  heur->add_option("--model", model, "exact, ind or cum")->check(CLI::IsMember({"exact", "ind", "cum", "independent", "cumulative"}));
  heur->add_option("--gamma", gamma)->check(CLI::NonNegativeNumber);
  heur->add_option("--seed", seed);
  heur->callback([&] { rc = heuristic(game_file, model, gamma, seed); });

  auto* look = app.add_subcommand("lookahead", "Lookahead model")->require_subcommand(1);
  int k = 1;
  std::string hfile, planfile;
  auto* inspect = look->add_subcommand("inspect", "Per-infoset action values and optimal sets");
  inspect->add_option("game", game_file)->required();
  inspect->add_option("--k", k)->check(CLI::PositiveNumber);
  inspect->add_option("--heuristic-file", hfile, "node,value CSV (default: exact)");
  inspect->add_option("--plan-file", planfile, "r's plan as seq,value CSV (default: uniform)");
  inspect->callback([&] { rc = lookahead_inspect(game_file, k, hfile, planfile); });

  CommitArgs ca;
  auto* com = app.add_subcommand("commit", "Optimal commitment against a lookahead player");
  com->add_option("game", ca.game)->required();
  com->add_option("--tie", ca.tie)->check(CLI::IsMember({"fav", "favorable", "static", "adv", "adversarial"}));
  com->add_option("--k", ca.k)->check(CLI::PositiveNumber);
  com->add_option("--heuristic", ca.heuristic, "exact or a node,value CSV file");
  com->add_flag("--oracle", ca.oracle, "enumerate induced structures instead of the MIP");
  com->add_option("--export-lp", ca.export_lp, "write the MIP in LP format");
  com->add_option("--node-cap", ca.node_cap)->check(CLI::PositiveNumber);
  com->add_option("--eps", ca.eps)->check(CLI::PositiveNumber);
  com->callback([&] { rc = commit(ca); });

  auto* gen = app.add_subcommand("gen", "Generate games")->require_subcommand(1);
  int gadget_kind = 1;
  std::string cnf, out, hout;
  auto* red = gen->add_subcommand("reduction", "SAT gadget from a DIMACS CNF");
  red->add_option("--theorem", gadget_kind, "1: favorable MAXSAT, 2: lookahead 2, 3: infosets")
      ->check(CLI::Range(1, 3));
  red->add_option("--cnf", cnf)->required();
  red->add_option("--out", out)->required();
  red->add_option("--heuristic-out", hout, "write the gadget's node values as CSV");
  red->callback([&] { rc = gen_reduction(gadget_kind, cnf, out, hout); });
  std::string kind = "kuhn";
  int seat = 1;
  auto* gg = gen->add_subcommand("game", "Write a built-in or random game file");
  gg->add_option("--kind", kind)->check(CLI::IsMember({"kuhn", "kj", "random"}));
  gg->add_option("--seat", seat, "seat of the rational player")->check(CLI::Range(1, 2));
  gg->add_option("--seed", seed);
  gg->add_option("--out", out)->required();
  gg->callback([&] { rc = gen_game(kind, seat, seed, out); });

  auto* exp = app.add_subcommand("experiment", "Noise sweeps")->require_subcommand(1);
  std::string config, rows;
  int threads = 0;
  bool trend = false;
  auto* run = exp->add_subcommand("run", "Run a grid from a key=value config");
  run->add_option("--config", config)->required();
  run->add_option("--out", out)->required();
  run->add_option("--threads", threads, "overrides the config")->check(CLI::NonNegativeNumber);
  run->callback([&] { rc = experiment_run(config, out, threads); });
  auto* sum = exp->add_subcommand("summarize", "Per-point mean, std, stderr and count");
  sum->add_option("rows", rows)->required();
  sum->add_option("--out", out, "default: stdout");
  sum->add_flag("--trend", trend, "exit 3 if a mean drops by more than 2 standard errors as gamma grows");
  sum->callback([&] { rc = experiment_summarize(rows, out, trend); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
