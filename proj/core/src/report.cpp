#include "cointvar/report.hpp"

#include "cointvar/error.hpp"
#include "cointvar/ingest.hpp"
#include "format.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace cointvar {

namespace {

std::string metric_or_na(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string("NA");
}

std::string two_decimals(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

std::string days_label(int window) {
  if (window % 96 == 0) return std::to_string(window / 96);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", window / 96.0);
  return buf;
}

}  // namespace

void write_grid(std::ostream& out, const BacktestGridResult& result) {
  out << "window,p,rank,n_ok,n_failed,mae,mse\n";
  for (const CellResult& c : result.cells) {
    out << c.cell.window << ',' << c.cell.p << ',' << c.cell.rank << ',' << c.losses.size() << ','
        << c.n_failed << ',' << metric_or_na(c.mae) << ',' << metric_or_na(c.mse) << '\n';
  }
}

void write_origin_losses(std::ostream& out, const BacktestGridResult& result) {
  out << "window,p,rank,origin,abs_loss,sq_loss\n";
  for (const CellResult& c : result.cells) {
    for (const OriginLoss& l : c.losses) {
      out << c.cell.window << ',' << c.cell.p << ',' << c.cell.rank << ',' << l.origin << ','
          << detail::format_double(l.abs_loss) << ',' << detail::format_double(l.sq_loss) << '\n';
    }
  }
}

void write_plot_records(std::ostream& out, const BacktestGridResult& result) {
  out << "T,p,r,metric,value\n";
  for (const CellResult& c : result.cells) {
    out << c.cell.window << ',' << c.cell.p << ',' << c.cell.rank << ",mae," << metric_or_na(c.mae) << '\n';
    out << c.cell.window << ',' << c.cell.p << ',' << c.cell.rank << ",mse," << metric_or_na(c.mse) << '\n';
  }
}

void write_origins(std::ostream& out, const BacktestGridResult& result,
                   const std::vector<Timestamp>& timestamps) {
  out << "index,timestamp\n";
  for (Eigen::Index o : result.origins) {
    out << o << ',';
    if (o >= 0 && static_cast<std::size_t>(o) < timestamps.size()) {
      out << format_timestamp(timestamps[static_cast<std::size_t>(o)]);
    }
    out << '\n';
  }
}

void write_failures(std::ostream& out, const BacktestGridResult& result) {
  out << "window,p,rank,n_failed,first_failure\n";
  for (const CellResult& c : result.cells) {
    if (c.n_failed == 0) continue;
    std::string text = c.first_failure;
    std::replace(text.begin(), text.end(), '"', '\'');
    out << c.cell.window << ',' << c.cell.p << ',' << c.cell.rank << ',' << c.n_failed << ",\""
        << text << "\"\n";
  }
}

void write_metadata(std::ostream& out, const BacktestGridResult& result) {
  const GridMetadata& m = result.metadata;
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(m.data_fingerprint));
  out << "seed=" << m.seed << '\n';
  out << "data_fingerprint=" << fp << '\n';
  out << "n_obs=" << m.n_obs << '\n';
  out << "dim=" << m.dim << '\n';
  out << "first_timestamp=" << format_timestamp(m.first_timestamp) << '\n';
  out << "last_timestamp=" << format_timestamp(m.last_timestamp) << '\n';
  out << "horizon=" << m.horizon << '\n';
  out << "origins=" << result.origins.size() << '\n';
  out << "origin_policy=" << m.origin_policy << '\n';
  out << "det=" << to_string(m.det) << '\n';
  out << "clip_nonnegative=" << (m.clip_nonnegative ? "true" : "false") << '\n';
  out << "dm_variant=sample-variance,normal-two-sided\n";
}

void write_summary_table(std::ostream& out, const std::vector<WindowSummary>& summary) {
  const char* labels[] = {"T/96 (=length in days)", "Best p", "Best r",
                          "Improvement to best VAR on dY_t", "Improvement to best VAR on Y_t"};
  std::vector<std::vector<std::string>> rows(5);
  for (const WindowSummary& s : summary) {
    rows[0].push_back(days_label(s.window));
    rows[1].push_back(s.available ? std::to_string(s.best_p) : "NA");
    rows[2].push_back(s.available ? std::to_string(s.best_rank) : "NA");
    rows[3].push_back(two_decimals(s.improvement_vs_diff_var));
    rows[4].push_back(two_decimals(s.improvement_vs_level_var));
  }
  std::size_t label_width = 0;
  for (const char* l : labels) label_width = std::max(label_width, std::string(l).size());
  std::vector<std::size_t> widths(summary.size(), 4);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) widths[j] = std::max(widths[j], row[j].size());
  }
  auto emit = [&](const char* label, const std::vector<std::string>& cells) {
    std::string line = label;
    line.resize(label_width, ' ');
    for (std::size_t j = 0; j < cells.size(); ++j) {
      std::string cell = cells[j];
      cell.insert(0, widths[j] - cell.size(), ' ');
      line += " | " + cell;
    }
    out << line << '\n';
  };
  emit(labels[0], rows[0]);
  std::size_t total = label_width;
  for (std::size_t w : widths) total += w + 3;
  out << std::string(total, '-') << '\n';
  for (int i = 1; i < 5; ++i) emit(labels[i], rows[static_cast<std::size_t>(i)]);
}

void write_backtest_outputs(const std::filesystem::path& dir, const BacktestGridResult& result,
                            const std::vector<Timestamp>& timestamps) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("grid.csv");
    write_grid(out, result);
  }
  {
    auto out = open("origin_losses.csv");
    write_origin_losses(out, result);
  }
  {
    auto out = open("plot.csv");
    write_plot_records(out, result);
  }
  {
    auto out = open("origins.csv");
    write_origins(out, result, timestamps);
  }
  {
    auto out = open("failures.csv");
    write_failures(out, result);
  }
  {
    auto out = open("metadata.txt");
    write_metadata(out, result);
  }
  {
    auto out = open("summary_mae.txt");
    write_summary_table(out, summarize_best(result, LossKind::kAbsolute));
  }
  {
    auto out = open("summary_mse.txt");
    write_summary_table(out, summarize_best(result, LossKind::kSquared));
  }
}

}  // namespace cointvar
