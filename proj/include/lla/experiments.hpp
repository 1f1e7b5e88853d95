#pragma once

// Noise sweeps: solve the adversarial commitment against noisy heuristics over
// a grid of (rational seat, lookahead, noise model, gamma, replicate), write
// one CSV row per solve and summarize per grid point.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "lla/commitment.hpp"
#include "lla/equilibrium.hpp"
#include "lla/game_io.hpp"
#include "lla/poker.hpp"
#include "lla/rng.hpp"

namespace lla {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const char* model_name(HeuristicModel m) {
  switch (m) {
    case HeuristicModel::kIndependent: return "independent";
    case HeuristicModel::kCumulative: return "cumulative";
    default: return to_string(m);
  }
}

inline HeuristicModel parse_noise_model(const std::string& s) {
  if (s == "independent" || s == "ind") return HeuristicModel::kIndependent;
  if (s == "cumulative" || s == "cum") return HeuristicModel::kCumulative;
  throw ConfigError("unknown noise model '" + s + "' (independent|cumulative)");
}

struct ExperimentGrid {
  std::string game = "kuhn";  // kuhn, kj or file
  std::string game_file;      // used when game == "file"
  std::vector<int> rational{1, 2};
  std::vector<int> k{1, 2};
  std::vector<HeuristicModel> models{HeuristicModel::kIndependent, HeuristicModel::kCumulative};
  std::vector<double> gamma{0.0, 0.25, 0.5, 1.0, 2.0};
  int seeds = 1000;
  // Replicates for k = 2 points; -1 means `seeds`, capped at 100 for kj.
  int seeds_k2 = -1;
  TieBreak tie = TieBreak::kAdversarial;
  std::uint64_t master_seed = 1;
  long node_cap = 100'000;  // B&B nodes per solve
  double eps = 1e-6;
  int threads = 1;

  int seeds_for(int depth) const {
    if (depth != 2 || seeds_k2 == 0) return seeds;
    if (seeds_k2 > 0) return seeds_k2;
    return game == "kj" ? std::min(seeds, 100) : seeds;
  }

  void validate() const {
    if (game != "kuhn" && game != "kj" && game != "file") {
      throw ConfigError("game must be kuhn, kj or file");
    }
    if (game == "file" && game_file.empty()) throw ConfigError("game=file needs game_file");
    if (game == "file" && rational != std::vector<int>{1}) {
      throw ConfigError("a game file fixes the roles; use rational=1");
    }
    if (rational.empty() || k.empty() || models.empty() || gamma.empty()) {
      throw ConfigError("rational, k, model and gamma need at least one value");
    }
    for (int r : rational) {
      if (r != 1 && r != 2) throw ConfigError("rational must be 1 or 2");
    }
    for (int d : k) {
      if (d < 1) throw ConfigError("k must be at least 1");
    }
    for (double g : gamma) {
      if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("gamma must be non-negative");
    }
    if (seeds < 1 || seeds_k2 < -1) throw ConfigError("seeds must be at least 1");
    if (node_cap < 1) throw ConfigError("node_cap must be positive");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (threads < 1) throw ConfigError("threads must be at least 1");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError("bad value '" + s + "' for " + key);
  return v;
}

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// FNV-1a, so a game name feeds the seed hash the same way everywhere.
inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

inline std::uint64_t double_bits(double v) {
  std::uint64_t b;
  static_assert(sizeof b == sizeof v);
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace detail

// Flat key=value lines; '#' starts a comment, lists are comma separated.
inline ExperimentGrid parse_grid_config(const std::string& text) {
  ExperimentGrid g;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    auto ints = [&] {
      std::vector<int> v;
      for (const auto& s : detail::split_list(val)) v.push_back(detail::parse_number<int>(key, s));
      return v;
    };
    if (key == "game") {
      g.game = val;
    } else if (key == "game_file") {
      g.game_file = val;
    } else if (key == "rational") {
      g.rational = ints();
    } else if (key == "k") {
      g.k = ints();
    } else if (key == "model") {
      g.models.clear();
      for (const auto& s : detail::split_list(val)) g.models.push_back(parse_noise_model(s));
    } else if (key == "gamma") {
      g.gamma.clear();
      for (const auto& s : detail::split_list(val)) g.gamma.push_back(detail::parse_number<double>(key, s));
    } else if (key == "seeds") {
      g.seeds = detail::parse_number<int>(key, val);
    } else if (key == "seeds_k2") {
      g.seeds_k2 = detail::parse_number<int>(key, val);
    } else if (key == "tie") {
      try {
        g.tie = parse_tie_break(val);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "master_seed") {
      g.master_seed = detail::parse_number<std::uint64_t>(key, val);
    } else if (key == "node_cap") {
      g.node_cap = detail::parse_number<long>(key, val);
    } else if (key == "eps") {
      g.eps = detail::parse_number<double>(key, val);
    } else if (key == "threads") {
      g.threads = detail::parse_number<int>(key, val);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Rows

struct ResultRow {
  std::string game;
  int rational = 1;
  int k = 1;
  std::string model;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  double value = std::nan("");
  std::string status;  // solver status, or "error: ..." when the solve threw
  double ms = 0.0;
};

inline constexpr const char* kRowsHeader = "game,rational,k,model,gamma,seed,value,status,ms";

inline std::string format_row(const ResultRow& r) {
  std::string status = r.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.ms);
  return r.game + ',' + std::to_string(r.rational) + ',' + std::to_string(r.k) + ',' + r.model +
         ',' + detail::fmt(r.gamma) + ',' + std::to_string(r.seed) + ',' + detail::fmt(r.value) +
         ',' + status + ',' + ms;
}

inline std::vector<ResultRow> parse_rows_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kRowsHeader) {
    throw ConfigError(std::string("rows CSV must start with ") + kRowsHeader);
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_list(line);
    if (f.size() != 9) throw ConfigError("line " + std::to_string(lineno) + ": expected 9 fields");
    ResultRow r;
    r.game = f[0];
    r.rational = detail::parse_number<int>("rational", f[1]);
    r.k = detail::parse_number<int>("k", f[2]);
    r.model = f[3];
    r.gamma = detail::parse_number<double>("gamma", f[4]);
    r.seed = detail::parse_number<std::uint64_t>("seed", f[5]);
    r.value = f[6] == "nan" ? std::nan("") : detail::parse_number<double>("value", f[6]);
    r.status = f[7];
    r.ms = detail::parse_number<double>("ms", f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Running

struct GridTask {
  int rational, k;
  HeuristicModel model;
  double gamma;
  int replicate;
  std::uint64_t seed;
  long alias = -1;  // earlier task solving the same instance
};

inline std::uint64_t row_seed(const ExperimentGrid& g, int rational, int k, HeuristicModel model,
                              double gamma, int replicate) {
  return hash_seed(g.master_seed,
                   {detail::name_hash(g.game), static_cast<std::uint64_t>(rational),
                    static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(model),
                    detail::double_bits(gamma), static_cast<std::uint64_t>(replicate)});
}

// Tasks in output order. Noise-free points repeat one instance, so every
// replicate after the first aliases it.
inline std::vector<GridTask> grid_tasks(const ExperimentGrid& g) {
  std::vector<GridTask> tasks;
  for (int r : g.rational) {
    for (int k : g.k) {
      for (HeuristicModel m : g.models) {
        for (double gm : g.gamma) {
          const long first = static_cast<long>(tasks.size());
          for (int rep = 0; rep < g.seeds_for(k); ++rep) {
            GridTask t{r, k, m, gm, rep, row_seed(g, r, k, m, gm, rep)};
            if (gm == 0.0 && rep > 0) t.alias = first;
            tasks.push_back(t);
          }
        }
      }
    }
  }
  return tasks;
}

struct SeatContext {
  GameTree game;
  EvaluationFunction base;
};

inline SeatContext seat_context(const ExperimentGrid& g, int rational) {
  SeatContext c;
  if (g.game == "kuhn") {
    c.game = build_kuhn(rational);
  } else if (g.game == "kj") {
    c.game = build_kj(rational);
  } else {
    c.game = load_game_file(g.game_file);
  }
  c.base = make_heuristic_exact(c.game, solve_zero_sum(c.game));
  return c;
}

inline ResultRow run_task(const ExperimentGrid& g, const SeatContext& ctx, const GridTask& t) {
  ResultRow row{g.game, t.rational, t.k, model_name(t.model), t.gamma, t.seed, std::nan(""), "", 0.0};
  const auto start = std::chrono::steady_clock::now();
  try {
    LookaheadSpec spec;
    spec.k = t.k;
    spec.tie = g.tie;
    spec.h = make_heuristic_noisy(ctx.game, ctx.base, t.model, t.gamma, t.seed);
    CommitOptions opt;
    opt.eps = g.eps;
    opt.mip.max_nodes = g.node_cap;
    const auto res = solve_commitment(ctx.game, spec, opt);
    row.status = optim::to_string(res.status);
    if (res.ok()) row.value = res.value_r;
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

// Runs every task and hands rows to `sink` in task order, whatever order the
// workers finish in. A failing solve becomes a row with status "error: ...".
inline void run_grid(const ExperimentGrid& g, const std::function<void(const ResultRow&)>& sink) {
  g.validate();
  std::map<int, SeatContext> ctx;
  for (int r : g.rational) ctx.emplace(r, seat_context(g, r));
  const auto tasks = grid_tasks(g);
  const long n = static_cast<long>(tasks.size());

  std::vector<std::optional<ResultRow>> done(n);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<long> next{0};
  auto work = [&] {
    for (long i = next++; i < n; i = next++) {
      if (tasks[i].alias >= 0) continue;
      ResultRow row = run_task(g, ctx.at(tasks[i].rational), tasks[i]);
      std::lock_guard lock(mu);
      done[i] = std::move(row);
      ready.notify_all();
    }
  };

  // With one thread the solves run inline so rows still stream out.
  std::vector<std::thread> pool;
  if (g.threads > 1) {
    for (int w = 0; w < g.threads; ++w) pool.emplace_back(work);
  }

  std::vector<ResultRow> first(n);
  for (long i = 0; i < n; ++i) {
    const GridTask& t = tasks[i];
    ResultRow row;
    if (t.alias >= 0) {
      row = first[t.alias];
      row.seed = t.seed;
      row.ms = 0.0;
    } else if (pool.empty()) {
      row = run_task(g, ctx.at(t.rational), t);
      if (t.gamma == 0.0) first[i] = row;
    } else {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return done[i].has_value(); });
      row = std::move(*done[i]);
      done[i].reset();
      if (t.gamma == 0.0) first[i] = row;
    }
    sink(row);
  }
  for (auto& th : pool) th.join();
}

inline std::vector<ResultRow> run_grid(const ExperimentGrid& g) {
  std::vector<ResultRow> rows;
  run_grid(g, [&](const ResultRow& r) { rows.push_back(r); });
  return rows;
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryRow {
  std::string game;
  int rational = 1;
  int k = 1;
  std::string model;
  double gamma = 0.0;
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
  double se = 0.0;  // sample standard deviation / sqrt(count)
  long count = 0;
};

inline constexpr const char* kSummaryHeader = "game,rational,k,model,gamma,mean,std,stderr,count";

// Per grid point over rows with status "optimal"; points without one are
// dropped. Sorted by (game, rational, k, model, gamma).
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, int, int, std::string, double>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : rows) {
    if (r.status != "optimal" || !std::isfinite(r.value)) continue;
    groups[{r.game, r.rational, r.k, r.model, r.gamma}].push_back(r.value);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, v] : groups) {
    SummaryRow s;
    std::tie(s.game, s.rational, s.k, s.model, s.gamma) = key;
    s.count = static_cast<long>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / s.count;
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / s.count);
    s.se = s.count > 1 ? std::sqrt(ss / (s.count - 1)) / std::sqrt(double(s.count)) : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = std::string(kSummaryHeader) + '\n';
  for (const auto& s : rows) {
    out += s.game + ',' + std::to_string(s.rational) + ',' + std::to_string(s.k) + ',' + s.model +
           ',' + detail::fmt(s.gamma) + ',' + detail::fmt(s.mean) + ',' + detail::fmt(s.sd) + ',' +
           detail::fmt(s.se) + ',' + std::to_string(s.count) + '\n';
  }
  return out;
}

// One comparison between neighbouring gammas of a configuration. The mean may
// drop by at most twice the standard error of the difference.
struct TrendStep {
  std::string game, model;
  int rational = 1, k = 1;
  double gamma_from = 0.0, gamma_to = 0.0;
  double mean_from = 0.0, mean_to = 0.0;
  double allowed = 0.0;
  bool ok = true;
};

inline std::vector<TrendStep> check_trend(const std::vector<SummaryRow>& summary) {
  std::vector<TrendStep> out;
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const auto& a = summary[i - 1];
    const auto& b = summary[i];
    if (a.game != b.game || a.rational != b.rational || a.k != b.k || a.model != b.model) continue;
    TrendStep t{a.game, a.model, a.rational, a.k, a.gamma, b.gamma, a.mean, b.mean};
    t.allowed = 2.0 * std::hypot(a.se, b.se);
    t.ok = b.mean >= a.mean - t.allowed;
    out.push_back(t);
  }
  return out;
}

}  // namespace lla
