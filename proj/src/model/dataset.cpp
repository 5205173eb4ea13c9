#include "patentlens/model/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patentlens/error.hpp"
#include "patentlens/features/text.hpp"

namespace patentlens::model {

const char* to_string(ClockOrigin origin) {
  return origin == ClockOrigin::FilingDate ? "filing_date" : "publication_date";
}

const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Calibrate: return "calibrate";
    case Split::Test: return "test";
  }
  return "test";
}

std::map<std::string, Split> Dataset::split_labels() const {
  std::map<std::string, Split> out;
  for (std::size_t i = 0; i < doc_numbers.size(); ++i) out.emplace(doc_numbers[i], splits[i]);
  return out;
}

std::vector<Eigen::Index> Dataset::indices(Split split) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

Eigen::MatrixXd Dataset::features(Split split) const { return X(indices(split), Eigen::all); }

Eigen::VectorXd Dataset::targets(Split split) const { return y(indices(split)); }

std::vector<Split> assign_splits(std::span<const std::string> doc_numbers, std::uint64_t seed,
                                 const SplitFractions& fractions) {
  const double total = fractions.train + fractions.calibrate + fractions.test;
  if (fractions.train < 0 || fractions.calibrate < 0 || fractions.test < 0 || std::abs(total - 1.0) > 1e-9) {
    fail(Errc::invalid_argument, "split fractions must be non-negative and sum to 1");
  }
  std::string seed_bytes(8, '\0');
  for (int b = 0; b < 8; ++b) seed_bytes[static_cast<std::size_t>(b)] = static_cast<char>((seed >> (8 * b)) & 0xFF);
  const std::uint64_t basis = features::fnv1a64(seed_bytes);

  const std::size_t n = doc_numbers.size();
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked(n);
  for (std::size_t i = 0; i < n; ++i) ranked[i] = {features::fnv1a64(doc_numbers[i], basis), i};
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return doc_numbers[a.second] < doc_numbers[b.second];
  });
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.train));
  const auto n_cal_end = std::min(
      n, static_cast<std::size_t>(std::llround(static_cast<double>(n) * (fractions.train + fractions.calibrate))));
  std::vector<Split> out(n, Split::Test);
  for (std::size_t r = 0; r < n; ++r) {
    out[ranked[r].second] = r < n_train ? Split::Train : (r < n_cal_end ? Split::Calibrate : Split::Test);
  }
  return out;
}

Dataset build_dataset(const store::PatentStore& store, const features::FeatureSchema& schema, ClockOrigin origin,
                      std::uint64_t seed, const SplitFractions& fractions) {
  std::vector<std::pair<const PatentDocument*, double>> eligible;
  const auto docs = store.documents();
  std::map<std::string, Date> application_publication;
  for (const auto& d : docs) {
    if (d.doc_kind == DocKind::Application) application_publication.emplace(d.doc_number, d.publication_date);
  }
  for (const auto& d : docs) {
    if (d.doc_kind != DocKind::Grant || !d.grant_date) continue;
    Date from = d.filing_date;
    if (origin == ClockOrigin::PublicationDate) {
      const auto it = application_publication.find(d.doc_number);
      if (it == application_publication.end()) continue;
      from = it->second;
    }
    const auto days = days_between(from, *d.grant_date);
    if (days < 0) continue;
    eligible.emplace_back(&d, static_cast<double>(days));
  }
  if (eligible.size() < kMinEligibleGrants) {
    fail(Errc::insufficient_data, "insufficient data: " + std::to_string(eligible.size()) +
                                      " eligible grants, need at least " + std::to_string(kMinEligibleGrants));
  }

  Dataset ds;
  ds.schema_id = schema.schema_id;
  ds.X.resize(static_cast<Eigen::Index>(eligible.size()), static_cast<Eigen::Index>(schema.total_dim()));
  ds.y.resize(static_cast<Eigen::Index>(eligible.size()));
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    const auto& [doc, target] = eligible[i];
    ds.doc_numbers.push_back(doc->doc_number);
    ds.X.row(static_cast<Eigen::Index>(i)) = features::assemble_features(*doc, schema).values.transpose();
    ds.y[static_cast<Eigen::Index>(i)] = target;
  }
  ds.splits = assign_splits(ds.doc_numbers, seed, fractions);
  return ds;
}

}  // namespace patentlens::model
