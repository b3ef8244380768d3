#include "cointvar/backtest.hpp"

#include "cointvar/error.hpp"
#include "cointvar/vecm.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>

namespace cointvar {

unsigned default_thread_count() {
  if (const char* env = std::getenv("COINTVAR_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Eigen::Index> sample_origins(Eigen::Index n_obs, Eigen::Index window_max, int horizon,
                                         int count, std::uint64_t seed) {
  if (count < 1 || horizon < 1 || window_max < 1) {
    throw Error(ErrorKind::kInvalidInput, "origin sampling needs count, horizon and window >= 1");
  }
  const Eigen::Index lo = window_max;
  const Eigen::Index hi = n_obs - horizon - 1;
  const Eigen::Index feasible = hi - lo + 1;
  if (feasible < count) {
    throw Error(ErrorKind::kInsufficientRange,
                "only " + std::to_string(std::max<Eigen::Index>(feasible, 0)) +
                    " feasible origins for " + std::to_string(count) + " requested");
  }

  // Floyd's sampling: exactly `count` draws, no rejection loop.
  std::mt19937_64 rng(seed);
  std::unordered_set<Eigen::Index> chosen;
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index j = feasible - count; j < feasible; ++j) {
    std::uniform_int_distribution<Eigen::Index> pick(0, j);
    Eigen::Index t = pick(rng);
    if (!chosen.insert(t).second) {
      chosen.insert(j);
      t = j;
    }
    out.push_back(lo + t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string describe(const Error& e) { return std::string(e.name()) + ": " + e.what(); }

void check_origin(Eigen::Index n_obs, Eigen::Index origin, int window, int horizon) {
  if (origin < window || origin + horizon >= n_obs) {
    throw Error(ErrorKind::kInvalidInput,
                "origin " + std::to_string(origin) + " incompatible with window " +
                    std::to_string(window) + " and horizon " + std::to_string(horizon));
  }
}

Matrix forecast_errors(const MatrixCRef& values, const VecmModel& model, Eigen::Index origin,
                       int window, int horizon, const ForecastOptions& forecast) {
  const auto history = values.middleRows(origin - window + 1, window);
  const ForecastPath path = forecast_vecm(model, history, horizon, forecast);
  return values.middleRows(origin + 1, horizon) - path.values;
}

}  // namespace

std::vector<OriginOutcome> run_cell(const MatrixCRef& values, const CellSpec& cell,
                                    const std::vector<Eigen::Index>& origins, int horizon,
                                    DeterministicSpec det, const ForecastOptions& forecast,
                                    const FitOptions& fit) {
  std::vector<OriginOutcome> out;
  out.reserve(origins.size());
  for (Eigen::Index origin : origins) {
    check_origin(values.rows(), origin, cell.window, horizon);
    OriginOutcome outcome;
    outcome.origin = origin;
    try {
      const auto window = values.middleRows(origin - cell.window + 1, cell.window);
      const VecmModel model = fit_vecm(window, cell.p, cell.rank, det, fit);
      outcome.errors = forecast_errors(values, model, origin, cell.window, horizon, forecast);
    } catch (const Error& e) {
      outcome.failure = describe(e);
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

CellResult summarize_cell(const CellSpec& cell, const std::vector<OriginOutcome>& outcomes,
                          int horizon) {
  CellResult result;
  result.cell = cell;
  std::vector<double> abs_losses, sq_losses;
  for (const OriginOutcome& o : outcomes) {
    if (!o.errors) {
      if (result.n_failed++ == 0) result.first_failure = o.failure;
      continue;
    }
    OriginLoss loss;
    loss.origin = o.origin;
    loss.abs_loss = origin_loss(*o.errors, LossKind::kAbsolute);
    loss.sq_loss = origin_loss(*o.errors, LossKind::kSquared);
    abs_losses.push_back(loss.abs_loss);
    sq_losses.push_back(loss.sq_loss);
    result.losses.push_back(loss);
  }
  if (!result.losses.empty()) {
    result.mae = mean_loss(abs_losses, horizon);
    result.mse = mean_loss(sq_losses, horizon);
  }
  return result;
}

const CellResult* BacktestGridResult::find(int window, int p, int rank) const {
  for (const CellResult& c : cells) {
    if (c.cell.window == window && c.cell.p == p && c.cell.rank == rank) return &c;
  }
  return nullptr;
}

std::uint64_t fingerprint(const TimeSeriesPanel& panel) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash ^= bytes[i];
      hash *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index i = 0; i < panel.n_obs(); ++i) {
    for (Eigen::Index j = 0; j < panel.dim(); ++j) {
      const double v = panel.values()(i, j);
      mix(&v, sizeof v);
    }
  }
  for (Timestamp t : panel.timestamps()) mix(&t, sizeof t);
  for (const std::string& label : panel.labels()) mix(label.data(), label.size() + 1);
  return hash;
}

namespace {

void validate_config(const BacktestConfig& config, const std::vector<int>& ranks, Eigen::Index d) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidInput, what); };
  if (config.windows.empty() || config.orders.empty() || ranks.empty()) fail("empty grid");
  if (config.horizon < 1) fail("horizon must be at least 1");
  if (config.origins < 1) fail("origin count must be at least 1");
  const int max_p = *std::max_element(config.orders.begin(), config.orders.end());
  if (*std::min_element(config.orders.begin(), config.orders.end()) < 1) fail("orders must be >= 1");
  for (int t : config.windows) {
    if (t < max_p + 2) {
      fail("window " + std::to_string(t) + " shorter than max(p) + 2 = " + std::to_string(max_p + 2));
    }
  }
  for (int r : ranks) {
    if (r < 0 || r > d) fail("rank " + std::to_string(r) + " outside [0, " + std::to_string(d) + "]");
  }
}

struct Slot {
  bool ok = false;
  double abs_loss = 0.0;
  double sq_loss = 0.0;
  std::string failure;
};

}  // namespace

BacktestGridResult run_grid(const TimeSeriesPanel& panel, const BacktestConfig& config) {
  const Eigen::Index d = panel.dim();
  std::vector<int> ranks = config.ranks;
  if (ranks.empty()) {
    for (int r = 0; r <= d; ++r) ranks.push_back(r);
  }
  validate_config(config, ranks, d);

  const int window_max = *std::max_element(config.windows.begin(), config.windows.end());
  BacktestGridResult result;
  result.origins =
      sample_origins(panel.n_obs(), window_max, config.horizon, config.origins, config.seed);

  GridMetadata& meta = result.metadata;
  meta.seed = config.seed;
  meta.data_fingerprint = fingerprint(panel);
  meta.n_obs = panel.n_obs();
  meta.dim = d;
  meta.first_timestamp = panel.timestamps().front();
  meta.last_timestamp = panel.timestamps().back();
  meta.horizon = config.horizon;
  meta.det = config.det;
  meta.clip_nonnegative = config.clip_nonnegative;

  const ForecastOptions forecast{config.clip_nonnegative};
  const MatrixCRef values = panel.values();
  const std::size_t n_origins = result.origins.size();
  const std::size_t n_orders = config.orders.size();
  const std::size_t n_ranks = ranks.size();
  const unsigned threads = config.threads > 0 ? config.threads : default_thread_count();

  for (int window : config.windows) {
    std::vector<Slot> slots(n_orders * n_ranks * n_origins);
    auto slot = [&](std::size_t pi, std::size_t ri, std::size_t oi) -> Slot& {
      return slots[(pi * n_ranks + ri) * n_origins + oi];
    };

    detail::parallel_for(n_origins, threads, [&](std::size_t oi) {
      const Eigen::Index origin = result.origins[oi];
      const auto history = values.middleRows(origin - window + 1, window);
      for (std::size_t pi = 0; pi < n_orders; ++pi) {
        std::optional<JohansenEstimator> estimator;
        std::string failure;
        try {
          estimator.emplace(history, config.orders[pi], config.det, config.fit);
        } catch (const Error& e) {
          failure = describe(e);
        }
        for (std::size_t ri = 0; ri < n_ranks; ++ri) {
          Slot& s = slot(pi, ri, oi);
          if (!estimator) {
            s.failure = failure;
            continue;
          }
          try {
            const VecmModel model = estimator->model(ranks[ri]);
            const Matrix errors = forecast_errors(values, model, origin, window, config.horizon, forecast);
            s.abs_loss = origin_loss(errors, LossKind::kAbsolute);
            s.sq_loss = origin_loss(errors, LossKind::kSquared);
            s.ok = true;
          } catch (const Error& e) {
            s.failure = describe(e);
          }
        }
      }
    });

    for (std::size_t pi = 0; pi < n_orders; ++pi) {
      for (std::size_t ri = 0; ri < n_ranks; ++ri) {
        CellResult cell;
        cell.cell = CellSpec{window, config.orders[pi], ranks[ri]};
        std::vector<double> abs_losses, sq_losses;
        for (std::size_t oi = 0; oi < n_origins; ++oi) {
          const Slot& s = slot(pi, ri, oi);
          if (!s.ok) {
            if (cell.n_failed++ == 0) cell.first_failure = s.failure;
            continue;
          }
          cell.losses.push_back(OriginLoss{result.origins[oi], s.abs_loss, s.sq_loss});
          abs_losses.push_back(s.abs_loss);
          sq_losses.push_back(s.sq_loss);
        }
        if (!cell.losses.empty()) {
          cell.mae = mean_loss(abs_losses, config.horizon);
          cell.mse = mean_loss(sq_losses, config.horizon);
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

std::vector<WindowSummary> summarize_best(const BacktestGridResult& result, LossKind metric) {
  if (result.cells.empty()) throw Error(ErrorKind::kInvalidInput, "empty backtest result");
  const int d = static_cast<int>(result.metadata.dim);

  std::vector<int> windows;
  for (const CellResult& c : result.cells) {
    if (std::find(windows.begin(), windows.end(), c.cell.window) == windows.end()) {
      windows.push_back(c.cell.window);
    }
  }

  std::vector<WindowSummary> out;
  for (int window : windows) {
    WindowSummary s;
    s.window = window;
    s.metric = metric;
    const CellResult* best = nullptr;
    std::optional<double> best_diff, best_level;
    for (const CellResult& c : result.cells) {
      if (c.cell.window != window) continue;
      const std::optional<double> loss = c.metric(metric);
      if (!loss) continue;
      if (best == nullptr || *loss < *best->metric(metric)) best = &c;
      if (c.cell.rank == 0 && (!best_diff || *loss < *best_diff)) best_diff = loss;
      if (c.cell.rank == d && (!best_level || *loss < *best_level)) best_level = loss;
    }
    if (best == nullptr) {
      s.note = "all cells failed";
      out.push_back(s);
      continue;
    }
    s.available = true;
    s.best_p = best->cell.p;
    s.best_rank = best->cell.rank;
    s.best_loss = *best->metric(metric);
    if (best_diff) s.improvement_vs_diff_var = relative_improvement(s.best_loss, *best_diff);
    if (best_level) s.improvement_vs_level_var = relative_improvement(s.best_loss, *best_level);
    out.push_back(s);
  }
  return out;
}

namespace {

CombinationLosses finish_losses(std::vector<double> abs_loss, std::vector<double> sq_loss,
                                int horizon) {
  CombinationLosses out;
  out.abs_loss = std::move(abs_loss);
  out.sq_loss = std::move(sq_loss);
  if (!out.abs_loss.empty()) {
    out.mae = mean_loss(out.abs_loss, horizon);
    out.mse = mean_loss(out.sq_loss, horizon);
  }
  return out;
}

DmOutcome run_dm(const std::vector<double>& a, const std::vector<double>& b, LossKind kind,
                 const DmOptions& options) {
  DmOutcome out;
  try {
    out.result = dm_test(a, b, kind, options);
  } catch (const Error& e) {
    out.note = describe(e);
  }
  return out;
}

}  // namespace

CombinationResult evaluate_combination(const MatrixCRef& values, int window, ModelChoice a,
                                       ModelChoice b, const std::vector<Eigen::Index>& origins,
                                       int horizon, DeterministicSpec det,
                                       const ForecastOptions& forecast, const FitOptions& fit,
                                       const DmOptions& dm) {
  CombinationResult result;
  result.window = window;
  result.a = a;
  result.b = b;

  struct Row {
    bool ok = false;
    std::exception_ptr failure;
    double abs[3] = {0, 0, 0};
    double sq[3] = {0, 0, 0};
  };
  std::vector<Row> rows(origins.size());
  for (Eigen::Index origin : origins) check_origin(values.rows(), origin, window, horizon);

  detail::parallel_for(origins.size(), default_thread_count(), [&](std::size_t i) {
    const Eigen::Index origin = origins[i];
    const auto history = values.middleRows(origin - window + 1, window);
    try {
      std::vector<ForecastPath> paths;
      paths.push_back(forecast_vecm(fit_vecm(history, a.p, a.rank, det, fit), history, horizon, forecast));
      paths.push_back(forecast_vecm(fit_vecm(history, b.p, b.rank, det, fit), history, horizon, forecast));
      const ForecastPath combined = combine_equal(paths);
      const auto actual = values.middleRows(origin + 1, horizon);
      const Matrix* forecasts[3] = {&paths[0].values, &paths[1].values, &combined.values};
      for (int k = 0; k < 3; ++k) {
        const Matrix errors = actual - *forecasts[k];
        rows[i].abs[k] = origin_loss(errors, LossKind::kAbsolute);
        rows[i].sq[k] = origin_loss(errors, LossKind::kSquared);
      }
      rows[i].ok = true;
    } catch (const Error&) {
      rows[i].failure = std::current_exception();
    }
  });

  std::vector<double> abs_loss[3], sq_loss[3];
  for (std::size_t i = 0; i < origins.size(); ++i) {
    if (!rows[i].ok) {
      ++result.n_failed;
      continue;
    }
    result.origins.push_back(origins[i]);
    for (int k = 0; k < 3; ++k) {
      abs_loss[k].push_back(rows[i].abs[k]);
      sq_loss[k].push_back(rows[i].sq[k]);
    }
  }
  if (result.origins.empty()) {
    // Nothing to evaluate; surface the first estimation error.
    for (const Row& row : rows) {
      if (row.failure) std::rethrow_exception(row.failure);
    }
    throw Error(ErrorKind::kInvalidInput, "combination study needs at least one origin");
  }
  result.model_a = finish_losses(abs_loss[0], sq_loss[0], horizon);
  result.model_b = finish_losses(abs_loss[1], sq_loss[1], horizon);
  result.combined = finish_losses(abs_loss[2], sq_loss[2], horizon);

  result.dm_abs_vs_a = run_dm(result.combined.abs_loss, result.model_a.abs_loss, LossKind::kAbsolute, dm);
  result.dm_abs_vs_b = run_dm(result.combined.abs_loss, result.model_b.abs_loss, LossKind::kAbsolute, dm);
  result.dm_sq_vs_a = run_dm(result.combined.sq_loss, result.model_a.sq_loss, LossKind::kSquared, dm);
  result.dm_sq_vs_b = run_dm(result.combined.sq_loss, result.model_b.sq_loss, LossKind::kSquared, dm);
  return result;
}

}  // namespace cointvar
