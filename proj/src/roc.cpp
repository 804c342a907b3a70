#include <algorithm>
#include <charconv>
#include <fstream>

#include "veriq/error.hpp"
#include "veriq/rng.hpp"
#include "veriq/simlab.hpp"

namespace veriq {

namespace {

constexpr std::uint64_t kCheatStreamTag = 0xC4EA7;

std::string shortest(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid(21);
  for (int i = 0; i <= 20; ++i) grid[i] = i * 0.025;
  return grid;
}

std::vector<std::size_t> desk_scale_k_grid() { return {100, 500, 1000, 2000, 4000}; }

std::vector<ServerStrategy> desk_scale_strategies() {
  std::vector<ServerStrategy> out;
  for (std::size_t k : desk_scale_k_grid()) out.push_back(strategy::SampleCheat{k});
  for (double d : {5.0, 10.0, 20.0, 50.0}) out.push_back(strategy::LaplaceCheat{d});
  return out;
}

std::vector<RocPoint> roc_sweep(const SignedRelation& relation,
                                const OwnerKey& key, const RocSweepConfig& cfg) {
  if (cfg.queries.empty() || cfg.k_grid.empty() || cfg.strategies.empty() ||
      cfg.epsilon_grid.empty())
    throw ParameterError("roc sweep grids must be non-empty");
  if (cfg.trials == 0) throw ParameterError("trials must be >= 1");
  for (const auto& s : cfg.strategies) validate(s);
  for (const auto& q : cfg.queries) q.query.validate(relation.schema());

  const std::size_t S = cfg.strategies.size();
  const std::size_t E = cfg.epsilon_grid.size();
  std::vector<RocPoint> out;
  out.reserve(cfg.queries.size() * cfg.k_grid.size() * S * E);

  for (std::size_t qi = 0; qi < cfg.queries.size(); ++qi) {
    const NamedQuery& nq = cfg.queries[qi];
    for (std::size_t ki = 0; ki < cfg.k_grid.size(); ++ki) {
      // Sketch and cheater streams depend only on (query, k), so every
      // strategy in this block is judged on the same trials.
      ErrorRateRun run;
      run.trials = cfg.trials;
      run.verifier_k = cfg.k_grid[ki];
      run.sketch_seed = derive_seed(cfg.seed, {qi, ki});
      run.cheat_seed = derive_seed(cfg.seed, {qi, ki, kCheatStreamTag});
      run.workers = cfg.workers;
      for (const auto& s : cfg.strategies) {
        const auto rates = error_rate_curve(relation, nq.query, cfg.epsilon_grid,
                                            s, run, key);
        for (std::size_t e = 0; e < E; ++e) {
          RocPoint p;
          p.query_id = nq.id;
          p.k = cfg.k_grid[ki];
          p.cheat_kind = strategy_kind(s);
          p.cheat_param = strategy_param(s);
          p.epsilon = cfg.epsilon_grid[e];
          p.p_fn = rates[e].p_fn;
          p.p_tn = rates[e].p_tn;
          p.trials = cfg.trials;
          p.seed = cfg.seed;
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

double roc_auc(std::span<const RocPoint> cell) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& p : cell) pts.emplace_back(p.p_fn, p.p_tn);
  std::sort(pts.begin(), pts.end());
  double area = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].first - pts[i - 1].first) *
            (pts[i].second + pts[i - 1].second) / 2;
  return area;
}

std::vector<RocCell> group_roc_cells(std::span<const RocPoint> points) {
  std::vector<RocCell> cells;
  for (const auto& p : points) {
    if (cells.empty() || cells.back().query_id != p.query_id ||
        cells.back().k != p.k || cells.back().cheat_kind != p.cheat_kind ||
        cells.back().cheat_param != p.cheat_param) {
      cells.push_back({p.query_id, p.k, p.cheat_kind, p.cheat_param, {}, 0});
    }
    cells.back().points.push_back(p);
  }
  for (auto& c : cells) c.auc = roc_auc(c.points);
  return cells;
}

std::string format_roc_row(const RocPoint& p) {
  return p.query_id + ',' + std::to_string(p.k) + ',' + p.cheat_kind + ',' +
         shortest(p.cheat_param) + ',' + shortest(p.epsilon) + ',' +
         shortest(p.p_fn) + ',' + shortest(p.p_tn) + ',' +
         std::to_string(p.trials) + ',' + std::to_string(p.seed);
}

void write_roc_csv(const std::string& path, std::span<const RocPoint> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << kRocCsvHeader << '\n';
  for (const auto& p : points) out << format_roc_row(p) << '\n';
}

}  // namespace veriq
