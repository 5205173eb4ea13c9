#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "patentlens/features/pipeline.hpp"
#include "patentlens/store/patent_store.hpp"

namespace patentlens::model {

enum class ClockOrigin { FilingDate, PublicationDate };
enum class Split { Train, Calibrate, Test };

const char* to_string(ClockOrigin origin);
const char* to_string(Split split);

struct SplitFractions {
  double train = 0.70;
  double calibrate = 0.15;
  double test = 0.15;
};

inline constexpr std::size_t kMinEligibleGrants = 50;

/// Rows are granted patents in doc_number order.
struct Dataset {
  std::string schema_id;
  std::vector<std::string> doc_numbers;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;  ///< target days
  std::vector<Split> splits;

  std::map<std::string, Split> split_labels() const;
  std::vector<Eigen::Index> indices(Split split) const;
  Eigen::MatrixXd features(Split split) const;
  Eigen::VectorXd targets(Split split) const;
};

/// Ranks documents by FNV-1a(seed bytes, doc_number) and cuts the ranking at
/// round(n * train) and round(n * (train + calibrate)). Independent of input
/// order.
std::vector<Split> assign_splits(std::span<const std::string> doc_numbers, std::uint64_t seed,
                                 const SplitFractions& fractions = {});

/// Grants with both an origin date and a grant date. With PublicationDate the
/// origin is the publication date of the application record sharing the
/// grant's doc_number; grants without one are skipped. Throws
/// Error(insufficient_data) below 50 eligible grants.
Dataset build_dataset(const store::PatentStore& store, const features::FeatureSchema& schema, ClockOrigin origin,
                      std::uint64_t seed, const SplitFractions& fractions = {});

}  // namespace patentlens::model
