#pragma once

#include "contractcad/engine.hpp"
#include "contractcad/model.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <string_view>

namespace ccad {

using json = nlohmann::json;

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

// Generic documents ----------------------------------------------------------

/// Manifest object: structure, parameters, version metadata with fragment
/// hashes, authored constraints. Fragment text itself is not included.
json manifest_json(const GenericDocument& doc);

/// Canonical manifest bytes: sorted keys, two-space indent, trailing "\n".
std::string manifest_text(const GenericDocument& doc);

/// Content hash pinning a generic snapshot (hash of the manifest text).
std::string generic_digest(const GenericDocument& doc);

/// Rebuilds a document from a manifest; `fragment` supplies each version's
/// template text. Throws Error(ManifestParse / UnsupportedSchema).
GenericDocument generic_from_manifest(const json& manifest,
                                      const std::function<std::string(const json& version)>& fragment);

json constraint_json(const Constraint& c);
Constraint constraint_from_json(const json& j);

// Instances -------------------------------------------------------------------

json instance_json(const DocumentInstance& instance, const std::string& generic_sha256, bool finalized);

/// Parses an instance file; bindings are typed with `doc`'s declarations.
DocumentInstance instance_from_json(const json& j, const GenericDocument& doc);

// Reports and edits -----------------------------------------------------------

json report_json(const CheckReport& report);
CheckReport report_from_json(const json& j);

json delta_json(const Delta& delta);
/// {"op": "bind", "param": "buyer", "value": "Acme"} etc. Bind values are
/// parsed with the parameter's declared type.
Delta delta_from_json(const json& j, const GenericDocument& doc);

json chain_json(const std::vector<ChainStep>& chain);

} // namespace ccad
