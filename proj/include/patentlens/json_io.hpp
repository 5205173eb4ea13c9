#pragma once

#include <nlohmann/json.hpp>

#include "patentlens/document.hpp"
#include "patentlens/ingest/ingest.hpp"

namespace patentlens {

using json = nlohmann::json;

/// Field names follow PatentDocument; dates are "YYYY-MM-DD"; an absent
/// grant_date is omitted.
json to_json(const PatentDocument& doc);

/// Inverse of to_json. Throws Error(invalid_argument) on missing or malformed
/// fields. Does not call validate().
PatentDocument document_from_json(const json& j);

json to_json(const ingest::QuarantineRecord& record);
json to_json(const ingest::IngestReport& report);

}  // namespace patentlens
