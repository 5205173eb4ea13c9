#include "patentlens/features/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <set>
#include <unordered_set>

#include <openssl/evp.h>

#include "patentlens/error.hpp"
#include "patentlens/features/text.hpp"

namespace patentlens::features {

FeatureSchema make_schema(std::size_t hash_dim, std::vector<int> ngram_orders) {
  if (hash_dim == 0 || !std::has_single_bit(hash_dim)) {
    fail(Errc::invalid_argument, "hash_dim must be a power of two");
  }
  std::sort(ngram_orders.begin(), ngram_orders.end());
  ngram_orders.erase(std::unique(ngram_orders.begin(), ngram_orders.end()), ngram_orders.end());
  if (ngram_orders.empty() || ngram_orders.front() < 1 || ngram_orders.back() > 2) {
    fail(Errc::invalid_argument, "ngram_orders must be a non-empty subset of {1,2}");
  }
  FeatureSchema s;
  s.engineered_names.assign(kEngineeredNames.begin(), kEngineeredNames.end());
  s.derived_names.assign(kDerivedNames.begin(), kDerivedNames.end());
  s.hash_dim = hash_dim;
  s.ngram_orders = std::move(ngram_orders);

  std::string layout = "patentlens-features/v1;engineered=";
  for (const auto& n : s.engineered_names) layout += n + ",";
  layout += ";derived=";
  for (const auto& n : s.derived_names) layout += n + ",";
  layout += ";hash=fnv1a64-signed;hash_dim=" + std::to_string(hash_dim) + ";ngram_orders=";
  for (int o : s.ngram_orders) layout += std::to_string(o) + ",";
  s.schema_id = hex64(fnv1a64(layout));
  return s;
}

std::vector<NamedValue> engineered_features(const PatentDocument& doc) {
  const double n_claims = static_cast<double>(doc.claims.size());
  const double n_independent =
      static_cast<double>(std::count_if(doc.claims.begin(), doc.claims.end(), [](const Claim& c) { return c.is_independent; }));
  const int year_offset = std::clamp(doc.filing_date.year() - kBaseFilingYear, 0, 30);

  std::array<double, 9> sections{};
  constexpr std::string_view kSections = "ABCDEFGHY";
  if (!doc.cpc_codes.empty() && !doc.cpc_codes.front().empty()) {
    const char sec = static_cast<char>(std::toupper(static_cast<unsigned char>(doc.cpc_codes.front().front())));
    if (const auto pos = kSections.find(sec); pos != std::string_view::npos) sections[pos] = 1.0;
  }

  const std::array<double, 19> values = {
      n_claims,
      n_independent,
      static_cast<double>(doc.inventors.size()),
      static_cast<double>(doc.assignees.size()),
      static_cast<double>(doc.backward_citation_count),
      static_cast<double>(count_tokens(doc.abstract_text)),
      static_cast<double>(count_tokens(doc.description_text, kDescriptionTokenCap)),
      static_cast<double>(count_tokens(doc.title)),
      static_cast<double>(year_offset),
      sections[0], sections[1], sections[2], sections[3], sections[4],
      sections[5], sections[6], sections[7], sections[8],
      doc.assignees.empty() ? 0.0 : 1.0};

  std::vector<NamedValue> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({kEngineeredNames[i], values[i]});
  return out;
}

std::vector<NamedValue> derived_features(const PatentDocument& doc) {
  double claim_tokens = 0;
  std::size_t dependent = 0;
  for (const auto& c : doc.claims) {
    claim_tokens += static_cast<double>(count_tokens(c.text));
    if (!c.is_independent) ++dependent;
  }
  const double n_claims = static_cast<double>(doc.claims.size());
  const double mean_claim = doc.claims.empty() ? 0.0 : claim_tokens / n_claims;
  const double dependent_ratio = doc.claims.empty() ? 0.0 : static_cast<double>(dependent) / n_claims;

  const auto abstract_tokens = tokenize(doc.abstract_text);
  double type_token = 0;
  if (!abstract_tokens.empty()) {
    const std::unordered_set<std::string> distinct(abstract_tokens.begin(), abstract_tokens.end());
    type_token = static_cast<double>(distinct.size()) / static_cast<double>(abstract_tokens.size());
  }

  double sentence_tokens = 0;
  std::size_t sentences = 0;
  std::size_t start = 0;
  const std::string_view abstract = doc.abstract_text;
  for (std::size_t i = 0; i <= abstract.size(); ++i) {
    if (i == abstract.size() || abstract[i] == '.' || abstract[i] == '!' || abstract[i] == '?') {
      const auto n = count_tokens(abstract.substr(start, i - start));
      if (n > 0) {
        sentence_tokens += static_cast<double>(n);
        ++sentences;
      }
      start = i + 1;
    }
  }
  const double mean_sentence = sentences == 0 ? 0.0 : sentence_tokens / static_cast<double>(sentences);

  const auto description_tokens = count_tokens(doc.description_text, kDescriptionTokenCap);
  const double claims_to_description =
      description_tokens == 0 ? 0.0 : claim_tokens / static_cast<double>(description_tokens);

  return {{kDerivedNames[0], mean_claim},
          {kDerivedNames[1], dependent_ratio},
          {kDerivedNames[2], type_token},
          {kDerivedNames[3], mean_sentence},
          {kDerivedNames[4], claims_to_description}};
}

Eigen::VectorXd hashed_text_features(std::span<const std::string> tokens, const FeatureSchema& schema) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(schema.hash_dim));
  const std::uint64_t mask = schema.hash_dim - 1;
  auto add = [&](std::uint64_t h) {
    const double sign = (h >> 63) == 0 ? 1.0 : -1.0;
    v[static_cast<Eigen::Index>(h & mask)] += sign;
  };
  std::string gram;
  for (int order : schema.ngram_orders) {
    if (tokens.size() < static_cast<std::size_t>(order)) continue;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
      gram = tokens[i];
      for (int k = 1; k < order; ++k) {
        gram.push_back(kNgramSeparator);
        gram += tokens[i + k];
      }
      add(fnv1a64(gram));
    }
  }
  // Sequential sum keeps the result bit-identical to other implementations.
  double sum_sq = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum_sq += v[i] * v[i];
  if (sum_sq > 0) {
    const double norm = std::sqrt(sum_sq);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] /= norm;
  }
  return v;
}

std::string hashed_text_of(const PatentDocument& doc) {
  std::string text = doc.title;
  text.push_back(' ');
  text += doc.abstract_text;
  for (const auto& c : doc.claims) {
    text.push_back(' ');
    text += c.text;
  }
  return text;
}

FeatureVector assemble_features(const PatentDocument& doc, const FeatureSchema& schema) {
  FeatureVector fv;
  fv.schema_id = schema.schema_id;
  fv.values.resize(static_cast<Eigen::Index>(schema.total_dim()));
  Eigen::Index i = 0;
  for (const auto& nv : engineered_features(doc)) fv.values[i++] = nv.value;
  for (const auto& nv : derived_features(doc)) fv.values[i++] = nv.value;
  const auto tokens = tokenize(hashed_text_of(doc));
  fv.values.tail(static_cast<Eigen::Index>(schema.hash_dim)) = hashed_text_features(tokens, schema);
  return fv;
}

std::string vector_sha256(const Eigen::Ref<const Eigen::VectorXd>& values) {
  std::string bytes;
  bytes.resize(static_cast<std::size_t>(values.size()) * 8);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[static_cast<std::size_t>(i) * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(Errc::internal, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex.push_back(kHex[digest[k] >> 4]);
    hex.push_back(kHex[digest[k] & 0xF]);
  }
  return hex;
}

}  // namespace patentlens::features
