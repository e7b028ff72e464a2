#pragma once

#include "contractcad/engine.hpp"

#include <filesystem>
#include <string>

namespace ccad::fixtures {

/// tests/fixtures in the source tree.
std::filesystem::path dir();

/// Engineering model form: 33 Parts, Part 4 holds Section 4-1 (two
/// versions), Part 14 Sections 14-1..14-6 (14-6 with two versions and a
/// reference to 33-1), Part 33 Section 33-1. Other Parts are leaves with one
/// version each.
GenericDocument iee_document();

/// Includes everything; selects the modified 4-1, the original 14-6 and the
/// single version elsewhere.
DocumentInstance iee_golden_instance(const GenericDocument& doc);

/// Sale-of-goods document with party/date parameters, the distinct-parties
/// and dating rules, a third-party dependency and an exclusive choice of law.
GenericDocument sale_document();

/// Complete, consistent instance of sale_document().
DocumentInstance sale_instance(const GenericDocument& doc, std::string id = "i1");

std::string read_text(const std::filesystem::path& path);

} // namespace ccad::fixtures
