#include "commands.hpp"

#include "cointvar/backtest.hpp"
#include "cointvar/error.hpp"
#include "cointvar/model_io.hpp"
#include "cointvar/report.hpp"
#include "cointvar/var.hpp"
#include "cointvar/vecm.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cointvar::cli {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
  auto fail = [&] {
    throw Error(ErrorKind::kInvalidSpec, std::string("field '") + name + "' must be a " +
                                             std::to_string(rows) + " x " + std::to_string(cols) +
                                             " array of rows");
  };
  Matrix m(rows, cols);
  if (cols == 0 && j.is_array() && j.empty()) return m;
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) fail();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail();
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) fail();
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::kInvalidSpec, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kInvalidSpec, std::string("field '") + key + "' has the wrong type");
  }
}

void print_error(std::ostream& err, const Error& e) {
  err << "error: " << e.name() << ": " << e.what() << '\n';
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Runs body and converts library errors into exit status 1.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    print_error(err, e);
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

json dgp_to_json(const DgpSpec& spec) {
  json j;
  j["d"] = spec.d;
  j["r_true"] = spec.r_true;
  j["p_true"] = spec.p_true;
  j["alpha"] = matrix_to_json(spec.alpha);
  j["beta"] = matrix_to_json(spec.beta);
  j["gamma"] = json::array();
  for (const Matrix& g : spec.gamma) j["gamma"].push_back(matrix_to_json(g));
  j["noise_cov"] = matrix_to_json(spec.noise_cov);
  j["n_obs"] = spec.n_obs;
  j["seed"] = spec.seed;
  j["initial"] = std::vector<double>(spec.initial.data(), spec.initial.data() + spec.initial.size());
  j["burn_in"] = spec.burn_in;
  return j;
}

DgpSpec dgp_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kInvalidSpec, "DGP spec must be a JSON object");
  DgpSpec spec;
  spec.d = required<int>(j, "d");
  spec.r_true = required<int>(j, "r_true");
  spec.p_true = required<int>(j, "p_true");
  if (spec.d < 1 || spec.r_true < 0 || spec.r_true > spec.d || spec.p_true < 1) {
    throw Error(ErrorKind::kInvalidSpec, "need d >= 1, 0 <= r_true <= d, p_true >= 1");
  }
  spec.alpha = matrix_from_json(required<json>(j, "alpha"), spec.d, spec.r_true, "alpha");
  spec.beta = matrix_from_json(required<json>(j, "beta"), spec.d, spec.r_true, "beta");
  const json gamma = j.value("gamma", json::array());
  if (!gamma.is_array() || static_cast<int>(gamma.size()) != spec.p_true - 1) {
    throw Error(ErrorKind::kInvalidSpec, "field 'gamma' must hold p_true - 1 matrices");
  }
  for (const json& g : gamma) spec.gamma.push_back(matrix_from_json(g, spec.d, spec.d, "gamma"));
  spec.noise_cov = matrix_from_json(required<json>(j, "noise_cov"), spec.d, spec.d, "noise_cov");
  spec.n_obs = required<Eigen::Index>(j, "n_obs");
  spec.seed = j.value("seed", std::uint64_t{0});
  const auto initial = j.value("initial", std::vector<double>(static_cast<std::size_t>(spec.d), 0.0));
  if (static_cast<int>(initial.size()) != spec.d) {
    throw Error(ErrorKind::kInvalidSpec, "field 'initial' must have d entries");
  }
  spec.initial = Eigen::Map<const Vector>(initial.data(), spec.d);
  spec.burn_in = j.value("burn_in", 200);
  return spec;
}

DgpSpec resolve_dgp(const std::string& source) {
  if (source == "preset:reference") return reference_dgp(8000, 1);
  const std::string rw = "preset:random-walk-";
  if (source.rfind(rw, 0) == 0) {
    const std::string digits = source.substr(rw.size());
    int d = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec != std::errc() || end != digits.data() + digits.size() || d < 1) {
      throw Error(ErrorKind::kInvalidSpec, "bad dimension in preset '" + source + "'");
    }
    return random_walk_dgp(d, 8000, 1);
  }
  if (source.rfind("preset:", 0) == 0) {
    throw Error(ErrorKind::kInvalidSpec, "unknown preset '" + source +
                                             "' (known: preset:reference, preset:random-walk-<d>)");
  }
  std::ifstream in(source);
  if (!in) throw Error(ErrorKind::kIo, "cannot open DGP spec '" + source + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidSpec, std::string("DGP spec is not valid JSON: ") + e.what());
  }
  return dgp_from_json(j);
}

TimeSeriesPanel load_source(const DataSource& source, std::ostream& log) {
  const bool has_files = !source.paths.empty();
  const bool has_dgp = !source.dgp.empty();
  if (has_files == has_dgp) {
    throw Error(ErrorKind::kInvalidInput, "give exactly one data source: --data files or --dgp spec");
  }
  if (has_dgp) {
    DgpSpec spec = resolve_dgp(source.dgp);
    if (source.n_obs) spec.n_obs = *source.n_obs;
    if (source.dgp_seed) spec.seed = *source.dgp_seed;
    log << "simulated " << spec.n_obs << " x " << spec.d << " panel (r_true=" << spec.r_true
        << ", seed=" << spec.seed << ")\n";
    return generate(spec);
  }
  std::vector<std::filesystem::path> paths(source.paths.begin(), source.paths.end());
  IngestResult loaded = load_panel(paths, source.ingest);
  const IngestReport& r = loaded.report;
  log << "ingested " << r.rows_read << " rows, " << r.regions_found.size() << " regions, "
      << loaded.panel.n_obs() << " grid rows " << format_timestamp(r.coverage_start) << " .. "
      << format_timestamp(r.coverage_end) << " (gaps filled " << r.gaps_filled
      << ", duplicates resolved " << r.duplicates_resolved << ", rows dropped " << r.rows_dropped
      << ")\n";
  return std::move(loaded.panel);
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TimeSeriesPanel panel = load_source(args.source, out);
    const DeterministicSpec det = parse_deterministic(args.det);
    const Eigen::Index d = panel.dim();

    ModelFile file;
    std::ostringstream summary;
    if (args.levels_var) {
      file.kind = ModelFile::Kind::kVar;
      file.var = fit_var(panel, args.p, det);
      summary << "model: var d=" << d << " p=" << args.p << " det=" << to_string(det) << '\n';
    } else {
      const int rank = args.rank.value_or(static_cast<int>(d));
      VecmModel vecm = fit_vecm(panel, args.p, rank, det);
      summary << "model: vecm d=" << d << " p=" << args.p << " rank=" << rank
              << " det=" << to_string(det) << '\n';
      summary << "eigenvalues:";
      if (vecm.eigenvalues.empty()) summary << " unavailable";
      for (double ev : vecm.eigenvalues) summary << ' ' << fmt(ev);
      summary << '\n';
      file.kind = ModelFile::Kind::kVecm;
      file.var = vecm_to_var(vecm);
      file.vecm = std::move(vecm);
    }
    summary << "effective observations: " << panel.n_obs() - args.p << '\n';
    summary << "residual covariance diagonal:";
    for (Eigen::Index j = 0; j < d; ++j) summary << ' ' << fmt(file.var.resid_cov(j, j));
    summary << '\n';
    out << summary.str();

    if (!args.out.empty()) {
      write_model(args.out, file);
      out << "wrote " << args.out << '\n';
    }
    return kExitOk;
  });
}

int cmd_backtest(const BacktestArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.metric != "mae" && args.metric != "mse" && args.metric != "both") {
      throw Error(ErrorKind::kInvalidInput, "metric must be mae, mse or both");
    }
    const TimeSeriesPanel panel = load_source(args.source, out);
    BacktestConfig config;
    config.windows = args.windows;
    config.orders = args.orders;
    config.ranks = args.ranks;
    config.horizon = args.horizon;
    config.origins = args.origins;
    config.seed = args.seed;
    config.det = parse_deterministic(args.det);
    config.clip_nonnegative = args.clip0;
    config.threads = args.threads;

    const BacktestGridResult result = run_grid(panel, config);
    write_backtest_outputs(args.out, result, panel.timestamps());

    if (args.metric != "mse") {
      out << "MAE summary\n";
      write_summary_table(out, summarize_best(result, LossKind::kAbsolute));
    }
    if (args.metric != "mae") {
      out << "MSE summary\n";
      write_summary_table(out, summarize_best(result, LossKind::kSquared));
    }

    int status = kExitOk;
    for (const CellResult& c : result.cells) {
      if (c.losses.empty()) {
        err << "cell T=" << c.cell.window << " p=" << c.cell.p << " r=" << c.cell.rank
            << " failed at every origin: " << c.first_failure << '\n';
        status = kExitCellFailure;
      }
    }
    out << "wrote " << args.out << '\n';
    return status;
  });
}

namespace {

void print_dm(std::ostream& out, const char* label, const DmOutcome& dm) {
  out << label << ": ";
  if (dm.result) {
    out << "statistic=" << fmt(dm.result->statistic) << " p_value=" << fmt(dm.result->p_value) << '\n';
  } else {
    out << "not computed (" << dm.note << ")\n";
  }
}

}  // namespace

int cmd_combine(const CombineArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TimeSeriesPanel panel = load_source(args.source, out);
    const int d = static_cast<int>(panel.dim());
    const ModelChoice a{args.a.first, args.a.second < 0 ? d : args.a.second};
    const ModelChoice b{args.b.first, args.b.second < 0 ? d : args.b.second};
    const auto origins = sample_origins(panel.n_obs(), args.window, args.horizon, args.origins, args.seed);
    const CombinationResult r = evaluate_combination(
        panel.values(), args.window, a, b, origins, args.horizon, parse_deterministic(args.det),
        ForecastOptions{args.clip0}, FitOptions{}, DmOptions{args.dm_bandwidth});

    std::ostringstream report;
    report << "combination study: window=" << args.window << " horizon=" << args.horizon
           << " origins=" << r.origins.size() << " failed=" << r.n_failed << '\n';
    report << "model              mae                    mse\n";
    auto row = [&](const std::string& name, const CombinationLosses& l) {
      std::string label = name;
      label.resize(18, ' ');
      report << label << ' ' << fmt(l.mae, "%.17g") << ' ' << fmt(l.mse, "%.17g") << '\n';
    };
    row("A p=" + std::to_string(a.p) + " r=" + std::to_string(a.rank), r.model_a);
    row("B p=" + std::to_string(b.p) + " r=" + std::to_string(b.rank), r.model_b);
    row("equal-weight", r.combined);
    const double best_mae = std::min(r.model_a.mae, r.model_b.mae);
    const double best_mse = std::min(r.model_a.mse, r.model_b.mse);
    report << "mae reduction vs best component: " << fmt(relative_improvement(r.combined.mae, best_mae), "%.4f") << '\n';
    report << "mse reduction vs best component: " << fmt(relative_improvement(r.combined.mse, best_mse), "%.4f") << '\n';
    print_dm(report, "dm absolute, combination vs A", r.dm_abs_vs_a);
    print_dm(report, "dm absolute, combination vs B", r.dm_abs_vs_b);
    print_dm(report, "dm squared, combination vs A", r.dm_sq_vs_a);
    print_dm(report, "dm squared, combination vs B", r.dm_sq_vs_b);
    out << report.str();

    if (!args.out.empty()) {
      std::ofstream file(args.out);
      if (!file) throw Error(ErrorKind::kIo, "cannot write '" + args.out + "'");
      file << report.str();
    }
    return kExitOk;
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    DgpSpec spec = resolve_dgp(args.dgp);
    if (args.n_obs) spec.n_obs = *args.n_obs;
    if (args.seed) spec.seed = *args.seed;
    if (!args.emit_spec.empty()) {
      std::ofstream file(args.emit_spec);
      if (!file) throw Error(ErrorKind::kIo, "cannot write '" + args.emit_spec + "'");
      file << dgp_to_json(spec).dump(2) << '\n';
      out << "wrote " << args.emit_spec << '\n';
    }
    if (!args.out.empty()) {
      write_wide(generate(spec), std::filesystem::path(args.out));
      out << "wrote " << args.out << '\n';
    }
    if (args.out.empty() && args.emit_spec.empty()) {
      throw Error(ErrorKind::kInvalidInput, "nothing to do: give --out and/or --emit-spec");
    }
    return kExitOk;
  });
}

namespace {

void add_source_options(CLI::App* cmd, DataSource& source) {
  auto* data = cmd->add_option("--data", source.paths, "Delimited input files (long or wide layout)");
  auto* dgp = cmd->add_option("--dgp", source.dgp,
                              "Simulated data: DGP JSON file, preset:reference or preset:random-walk-<d>");
  data->excludes(dgp);
  cmd->add_option("--n-obs", source.n_obs, "Override the DGP observation count");
  cmd->add_option("--dgp-seed", source.dgp_seed, "Override the DGP seed");
  cmd->add_option("--max-gap", source.ingest.max_gap, "Longest interpolated gap in slots")
      ->default_val(8);
  cmd->add_option("--regions", source.ingest.expected_regions, "Expected number of regions");
}

std::pair<int, int> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("expected p,r");
  const int p = std::stoi(text.substr(0, comma));
  const std::string r = text.substr(comma + 1);
  return {p, r == "d" ? -1 : std::stoi(r)};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cointegrated VAR (VECM) forecasting and rolling-window backtests"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate one VECM (or levels VAR) and write a model file");
  add_source_options(fit_cmd, fit.source);
  fit_cmd->add_option("--p", fit.p, "Autoregressive order")->required();
  fit_cmd->add_option("--rank", fit.rank, "Cointegrating rank (default d)");
  fit_cmd->add_flag("--var", fit.levels_var, "Fit a VAR in levels by least squares");
  fit_cmd->add_option("--det", fit.det, "Deterministic term")->check(CLI::IsMember({"none", "constant"}));
  fit_cmd->add_option("--out", fit.out, "Model file to write");

  BacktestArgs bt;
  auto* bt_cmd = app.add_subcommand("backtest", "Rolling-window study over the (T, p, r) grid");
  add_source_options(bt_cmd, bt.source);
  bt_cmd->add_option("--window", bt.windows, "Calibration window lengths")->delimiter(',');
  bt_cmd->add_option("--p", bt.orders, "Autoregressive orders")->delimiter(',');
  bt_cmd->add_option("--rank", bt.ranks, "Cointegrating ranks (default 0..d)")->delimiter(',');
  bt_cmd->add_option("--horizon", bt.horizon, "Forecast horizon H")->default_val(8);
  bt_cmd->add_option("--origins", bt.origins, "Number of sampled origins N")->default_val(1000);
  bt_cmd->add_option("--seed", bt.seed, "Origin sampling seed");
  bt_cmd->add_option("--det", bt.det, "Deterministic term")->check(CLI::IsMember({"none", "constant"}));
  bt_cmd->add_flag("--clip0", bt.clip0, "Clip forecasts at 0");
  bt_cmd->add_option("--metric", bt.metric, "Summary tables to print")
      ->check(CLI::IsMember({"mae", "mse", "both"}));
  bt_cmd->add_option("--out", bt.out, "Output directory");
  bt_cmd->add_option("--threads", bt.threads, "Worker threads (default COINTVAR_THREADS or all cores)");

  CombineArgs cb;
  std::string a_text, b_text;
  auto* cb_cmd = app.add_subcommand("combine", "Evaluate an equal-weight combination of two VECMs");
  add_source_options(cb_cmd, cb.source);
  cb_cmd->add_option("--window", cb.window, "Calibration window length")->default_val(768);
  cb_cmd->add_option("--a", a_text, "First model as p,r (r may be 'd'); default 7,d");
  cb_cmd->add_option("--b", b_text, "Second model as p,r; default 2,1");
  cb_cmd->add_option("--horizon", cb.horizon, "Forecast horizon H")->default_val(8);
  cb_cmd->add_option("--origins", cb.origins, "Number of sampled origins N")->default_val(1000);
  cb_cmd->add_option("--seed", cb.seed, "Origin sampling seed");
  cb_cmd->add_option("--det", cb.det, "Deterministic term")->check(CLI::IsMember({"none", "constant"}));
  cb_cmd->add_flag("--clip0", cb.clip0, "Clip forecasts at 0");
  cb_cmd->add_option("--dm-bandwidth", cb.dm_bandwidth, "Bartlett lags for the DM variance");
  cb_cmd->add_option("--out", cb.out, "Report file to write");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a panel from a DGP spec");
  sim_cmd->add_option("--dgp", sim.dgp, "DGP JSON file or preset");
  sim_cmd->add_option("--n-obs", sim.n_obs, "Override the observation count");
  sim_cmd->add_option("--seed", sim.seed, "Override the seed");
  sim_cmd->add_option("--out", sim.out, "Wide CSV to write");
  sim_cmd->add_option("--emit-spec", sim.emit_spec, "Write the resolved DGP spec as JSON");

  try {
    app.parse(argc, argv);
    if (!a_text.empty()) cb.a = parse_pair(a_text);
    if (!b_text.empty()) cb.b = parse_pair(b_text);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (*fit_cmd) return cmd_fit(fit, out, err);
  if (*bt_cmd) return cmd_backtest(bt, out, err);
  if (*cb_cmd) return cmd_combine(cb, out, err);
  return cmd_simulate(sim, out, err);
}

}  // namespace cointvar::cli
