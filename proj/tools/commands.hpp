#pragma once

#include "cointvar/ingest.hpp"
#include "cointvar/panel.hpp"
#include "cointvar/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cointvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
// Backtest finished but at least one cell had no successful origin.
inline constexpr int kExitCellFailure = 3;

// Exactly one of `paths` (delimited files) or `dgp` (JSON file or
// "preset:reference" / "preset:random-walk-<d>") must be set.
struct DataSource {
  std::vector<std::string> paths;
  std::string dgp;
  std::optional<Eigen::Index> n_obs;     // overrides the DGP spec
  std::optional<std::uint64_t> dgp_seed;  // overrides the DGP spec
  IngestOptions ingest;
};

TimeSeriesPanel load_source(const DataSource& source, std::ostream& log);

nlohmann::json dgp_to_json(const DgpSpec& spec);
// Throws kInvalidSpec for missing or malformed fields.
DgpSpec dgp_from_json(const nlohmann::json& j);
DgpSpec resolve_dgp(const std::string& source);

struct FitArgs {
  DataSource source;
  int p = 1;
  std::optional<int> rank;  // defaults to d
  bool levels_var = false;  // fit a VAR in levels instead of a VECM
  std::string det = "constant";
  std::string out;
};

struct BacktestArgs {
  DataSource source;
  std::vector<int> windows{96, 192, 384, 768, 1536, 3072};
  std::vector<int> orders{1, 2, 3, 4, 5, 6, 7};
  std::vector<int> ranks;  // empty: 0..d
  int horizon = 8;
  int origins = 1000;
  std::uint64_t seed = 1;
  std::string det = "constant";
  bool clip0 = false;
  std::string metric = "both";
  std::string out = "backtest_out";
  unsigned threads = 0;
};

struct CombineArgs {
  DataSource source;
  int window = 768;
  std::pair<int, int> a{7, -1};  // (p, r); r = -1 means d
  std::pair<int, int> b{2, 1};
  int horizon = 8;
  int origins = 1000;
  std::uint64_t seed = 1;
  std::string det = "constant";
  bool clip0 = false;
  int dm_bandwidth = 0;
  std::string out;  // optional report file
};

struct SimulateArgs {
  std::string dgp = "preset:reference";
  std::optional<Eigen::Index> n_obs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string emit_spec;  // write the resolved spec as JSON
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmd_backtest(const BacktestArgs& args, std::ostream& out, std::ostream& err);
int cmd_combine(const CombineArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

// Full command line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cointvar::cli
