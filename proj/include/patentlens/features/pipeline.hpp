#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "patentlens/document.hpp"

namespace patentlens::features {

inline constexpr std::array<std::string_view, 19> kEngineeredNames = {
    "n_claims",          "n_independent_claims", "n_inventors",           "n_assignees",
    "backward_citation_count", "abstract_token_count", "description_token_count", "title_token_count",
    "filing_year_offset", "cpc_A",               "cpc_B",                 "cpc_C",
    "cpc_D",             "cpc_E",                "cpc_F",                 "cpc_G",
    "cpc_H",             "cpc_Y",                "has_assignee"};

inline constexpr std::array<std::string_view, 5> kDerivedNames = {
    "mean_claim_token_length", "dependent_claim_ratio", "abstract_type_token_ratio",
    "mean_sentence_token_length", "claims_to_description_length_ratio"};

inline constexpr std::size_t kDescriptionTokenCap = 50000;
inline constexpr int kBaseFilingYear = 2005;
inline constexpr char kNgramSeparator = '\x1f';

/// Layout of a feature vector: engineered | derived | hashed n-grams.
struct FeatureSchema {
  std::string schema_id;
  std::vector<std::string> engineered_names;
  std::vector<std::string> derived_names;
  std::size_t hash_dim = 16384;
  std::vector<int> ngram_orders = {1, 2};

  std::size_t total_dim() const { return engineered_names.size() + derived_names.size() + hash_dim; }
  std::size_t hashed_offset() const { return engineered_names.size() + derived_names.size(); }
};

/// Throws Error(invalid_argument) unless hash_dim is a power of two and the
/// orders are a non-empty subset of {1, 2}. schema_id is a content hash of
/// the layout, so it changes whenever any layout field does.
FeatureSchema make_schema(std::size_t hash_dim = 16384, std::vector<int> ngram_orders = {1, 2});

struct NamedValue {
  std::string_view name;
  double value;
};

std::vector<NamedValue> engineered_features(const PatentDocument& doc);
std::vector<NamedValue> derived_features(const PatentDocument& doc);

/// Signed feature hashing of the schema's n-gram orders, L2-normalized. The
/// all-zero vector (no n-grams) is returned as is.
Eigen::VectorXd hashed_text_features(std::span<const std::string> tokens, const FeatureSchema& schema);

struct FeatureVector {
  std::string schema_id;
  Eigen::VectorXd values;
};

/// Text hashed into the representational block: title, abstract and claims.
std::string hashed_text_of(const PatentDocument& doc);

FeatureVector assemble_features(const PatentDocument& doc, const FeatureSchema& schema);

/// SHA-256 (hex) over the values as little-endian IEEE-754 doubles.
std::string vector_sha256(const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace patentlens::features
