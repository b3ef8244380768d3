#include "cointvar/ingest.hpp"

#include "cointvar/error.hpp"
#include "format.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

namespace cointvar {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(delim, start);
    fields.push_back(trim(std::string_view(line).substr(start, at == std::string::npos ? std::string::npos : at - start)));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return fields;
}

bool parse_int(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_missing(const std::string& field) {
  const std::string v = lower(field);
  return v.empty() || v == "na" || v == "nan" || v == "n/a" || v == "n/e" || v == "-";
}

// Returns NaN for missing markers; nullopt for unparsable text.
std::optional<double> parse_value(const std::string& field) {
  if (is_missing(field)) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;     // non-missing observations
  std::size_t occurrences = 0;
};

using RegionSeries = std::map<Timestamp, Accumulator>;

void add_record(std::map<std::string, RegionSeries>& data, const std::string& region, Timestamp t,
                double value) {
  Accumulator& acc = data[region][t];
  ++acc.occurrences;
  if (!std::isnan(value)) {
    acc.sum += value;
    ++acc.count;
  }
}

void read_source(std::istream& in, const std::string& name,
                 std::map<std::string, RegionSeries>& data, IngestReport& report) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(name + ": empty input", 1);
  ++line_no;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const char delim = line.find(';') != std::string::npos ? ';' : ',';
  const std::vector<std::string> header = split(line, delim);
  std::vector<std::string> lowered;
  for (const auto& h : header) lowered.push_back(lower(h));

  const bool long_form = lowered == std::vector<std::string>{"timestamp", "region", "value"};
  if (!long_form && (lowered.size() < 2 || lowered[0] != "timestamp")) {
    throw ParseError(name + ": unrecognised header, expected 'timestamp,region,value' or "
                            "'timestamp,<region>,...'",
                     line_no);
  }
  for (std::size_t j = 1; !long_form && j < header.size(); ++j) {
    if (header[j].empty()) throw ParseError(name + ": empty region label in header", line_no);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, delim);
    if (fields.size() != header.size()) {
      throw ParseError(name + ": expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Timestamp t = 0;
    try {
      t = parse_timestamp(fields[0]);
    } catch (const Error& e) {
      throw ParseError(name + ": " + e.what(), line_no);
    }
    ++report.rows_read;
    if (long_form) {
      if (fields[1].empty()) throw ParseError(name + ": empty region label", line_no);
      const auto value = parse_value(fields[2]);
      if (!value) throw ParseError(name + ": bad value '" + fields[2] + "'", line_no);
      add_record(data, fields[1], t, *value);
    } else {
      for (std::size_t j = 1; j < fields.size(); ++j) {
        const auto value = parse_value(fields[j]);
        if (!value) throw ParseError(name + ": bad value '" + fields[j] + "'", line_no);
        add_record(data, header[j], t, *value);
      }
    }
  }
}

IngestResult assemble(std::map<std::string, RegionSeries>& data, IngestReport report,
                      const IngestOptions& options) {
  if (data.empty()) throw Error(ErrorKind::kNoOverlap, "no observations found");
  for (const auto& [region, series] : data) report.regions_found.push_back(region);
  if (options.expected_regions && data.size() != *options.expected_regions) {
    throw Error(ErrorKind::kSchema, "expected " + std::to_string(*options.expected_regions) +
                                        " regions, found " + std::to_string(data.size()));
  }
  if (options.step <= 0) throw Error(ErrorKind::kInvalidInput, "grid step must be positive");

  Timestamp start = std::numeric_limits<Timestamp>::min();
  Timestamp end = std::numeric_limits<Timestamp>::max();
  for (auto& [region, series] : data) {
    std::optional<Timestamp> first, last;
    for (const auto& [t, acc] : series) {
      if (acc.occurrences > 1) ++report.duplicates_resolved;
      if (acc.count == 0) continue;
      if (!first) first = t;
      last = t;
    }
    if (!first) throw Error(ErrorKind::kNoOverlap, "region '" + region + "' has no values");
    start = std::max(start, *first);
    end = std::min(end, *last);
  }
  if (start > end) throw Error(ErrorKind::kNoOverlap, "regions share no common coverage");

  for (const auto& [region, series] : data) {
    for (const auto& [t, acc] : series) {
      if (((t - start) % options.step + options.step) % options.step != 0) {
        throw Error(ErrorKind::kSchema, "timestamp " + format_timestamp(t) + " of region '" +
                                            region + "' is off the " +
                                            std::to_string(options.step) + " s grid");
      }
    }
  }

  const Eigen::Index slots = static_cast<Eigen::Index>((end - start) / options.step) + 1;
  const Eigen::Index d = static_cast<Eigen::Index>(data.size());
  Matrix grid = Matrix::Constant(slots, d, std::numeric_limits<double>::quiet_NaN());
  Eigen::Index col = 0;
  for (const auto& [region, series] : data) {
    for (auto it = series.lower_bound(start); it != series.end() && it->first <= end; ++it) {
      if (it->second.count > 0) {
        grid((it->first - start) / options.step, col) = it->second.sum / static_cast<double>(it->second.count);
      }
    }
    ++col;
  }

  // Interpolate short interior gaps; remember which slots were filled.
  std::vector<std::vector<bool>> filled(static_cast<std::size_t>(d),
                                        std::vector<bool>(static_cast<std::size_t>(slots), false));
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index i = 0;
    while (i < slots) {
      if (!std::isnan(grid(i, j))) {
        ++i;
        continue;
      }
      Eigen::Index stop = i;
      while (stop < slots && std::isnan(grid(stop, j))) ++stop;
      const Eigen::Index run = stop - i;
      if (i > 0 && stop < slots && static_cast<std::size_t>(run) <= options.max_gap) {
        const double left = grid(i - 1, j);
        const double right = grid(stop, j);
        for (Eigen::Index k = i; k < stop; ++k) {
          const double w = static_cast<double>(k - i + 1) / static_cast<double>(run + 1);
          grid(k, j) = left + w * (right - left);
          filled[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = true;
        }
      }
      i = stop;
    }
  }

  // Longest block of complete rows.
  Eigen::Index best_start = 0, best_len = 0, run_start = 0;
  for (Eigen::Index i = 0; i <= slots; ++i) {
    const bool complete = i < slots && !grid.row(i).array().isNaN().any();
    if (complete) continue;
    if (i - run_start > best_len) {
      best_len = i - run_start;
      best_start = run_start;
    }
    run_start = i + 1;
  }
  if (best_len == 0) throw Error(ErrorKind::kNoOverlap, "no complete rows after gap handling");

  report.rows_dropped = static_cast<std::size_t>(slots - best_len);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = best_start; i < best_start + best_len; ++i) {
      if (filled[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) ++report.gaps_filled;
    }
  }
  const Timestamp first = start + best_start * options.step;
  report.coverage_start = first;
  report.coverage_end = first + (best_len - 1) * options.step;

  TimeSeriesPanel panel = TimeSeriesPanel::uniform(grid.middleRows(best_start, best_len), first,
                                                   options.step, report.regions_found);
  return IngestResult{std::move(panel), std::move(report)};
}

}  // namespace

Timestamp parse_timestamp(const std::string& raw) {
  const std::string text = trim(raw);
  auto fail = [&]() -> Timestamp {
    throw Error(ErrorKind::kInvalidInput, "bad timestamp '" + text + "'");
  };
  if (text.empty()) return fail();
  if (std::all_of(text.begin() + (text[0] == '-' ? 1 : 0), text.end(),
                  [](unsigned char c) { return std::isdigit(c); }) &&
      text.size() < 16 && text.find('-', 1) == std::string::npos) {
    Timestamp t = 0;
    std::from_chars(text.data(), text.data() + text.size(), t);
    return t;
  }

  // YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+HH:MM|+HHMM]
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':') {
    return fail();
  }
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!parse_int(std::string_view(text).substr(0, 4), year) ||
      !parse_int(std::string_view(text).substr(5, 2), month) ||
      !parse_int(std::string_view(text).substr(8, 2), day) ||
      !parse_int(std::string_view(text).substr(11, 2), hour) ||
      !parse_int(std::string_view(text).substr(14, 2), minute)) {
    return fail();
  }
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (pos + 3 > text.size() || !parse_int(std::string_view(text).substr(pos + 1, 2), second)) return fail();
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
  }
  long offset = 0;
  if (pos < text.size()) {
    const std::string zone = text.substr(pos);
    if (zone == "Z" || zone == "z") {
      offset = 0;
    } else if ((zone[0] == '+' || zone[0] == '-') && (zone.size() == 6 || zone.size() == 5)) {
      int oh = 0, om = 0;
      const std::string_view mm = zone.size() == 6 ? std::string_view(zone).substr(4, 2)
                                                   : std::string_view(zone).substr(3, 2);
      if ((zone.size() == 6 && zone[3] != ':') || !parse_int(std::string_view(zone).substr(1, 2), oh) ||
          !parse_int(mm, om)) {
        return fail();
      }
      offset = (zone[0] == '+' ? 1 : -1) * (oh * 3600L + om * 60L);
    } else {
      return fail();
    }
  }

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return fail();
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days_since_epoch) * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto days = static_cast<long>(std::floor(static_cast<double>(t) / 86400.0));
  const Timestamp rem = t - static_cast<Timestamp>(days) * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                static_cast<int>(rem % 60));
  return buf;
}

IngestResult load_panel(std::span<std::istream* const> sources, std::span<const std::string> names,
                        const IngestOptions& options) {
  std::map<std::string, RegionSeries> data;
  IngestReport report;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    read_source(*sources[i], i < names.size() ? names[i] : "input " + std::to_string(i), data, report);
  }
  return assemble(data, std::move(report), options);
}

IngestResult load_panel(std::span<const std::filesystem::path> paths, const IngestOptions& options) {
  std::vector<std::ifstream> files;
  std::vector<std::istream*> streams;
  std::vector<std::string> names;
  files.reserve(paths.size());
  for (const auto& path : paths) {
    files.emplace_back(path);
    if (!files.back()) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
    names.push_back(path.string());
  }
  for (auto& f : files) streams.push_back(&f);
  return load_panel(std::span<std::istream* const>(streams), names, options);
}

void write_wide(const TimeSeriesPanel& panel, std::ostream& out) {
  out << "timestamp";
  for (const auto& label : panel.labels()) out << ',' << label;
  out << '\n';
  for (Eigen::Index i = 0; i < panel.n_obs(); ++i) {
    out << format_timestamp(panel.timestamps()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < panel.dim(); ++j) out << ',' << detail::format_double(panel.values()(i, j));
    out << '\n';
  }
}

void write_wide(const TimeSeriesPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  write_wide(panel, out);
}

}  // namespace cointvar
