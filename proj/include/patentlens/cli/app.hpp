#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patentlens/model/dataset.hpp"

namespace patentlens::cli {

/// Every key can come from the JSON config file and be overridden by the long
/// flag of the same name with dashes (store_path -> --store-path).
struct RunConfig {
  std::string store_path;
  std::string alias_table_path;
  std::string model_path;
  std::size_t hash_dim = 16384;
  std::vector<int> ngram_orders = {1, 2};
  std::vector<double> lambda_grid = {0.1, 1.0, 10.0};
  std::vector<int> rounds_grid = {100, 200};
  double alpha = 0.1;
  std::uint64_t split_seed = 42;
  model::ClockOrigin clock_origin = model::ClockOrigin::FilingDate;
  std::string host = "127.0.0.1";
  int port = 8080;
  unsigned workers = 1;
  std::string trained_at;  ///< empty: SOURCE_DATE_EPOCH if set, else now
};

/// Overlays the keys present in `j` onto `config`. Unknown keys are an error.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

/// Exit codes: 0 success, 1 user error (bad flags, bad input, insufficient
/// data), 2 internal error. Results go to `out` as JSON, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Bulk-data archive URLs for the weekly releases between two dates.
nlohmann::json bulk_data_urls(const std::string& from, const std::string& to);

}  // namespace patentlens::cli
