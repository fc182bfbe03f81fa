// Copyright 2026 The GLP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Ledgers on disk: pretty-printed JSON with a fixed key order (schema in
// docs/ledger_schema.md). serialize(parse(text)) == text for any text this
// module wrote.

#ifndef GLP_ORCHESTRATOR_LEDGER_IO_HPP_
#define GLP_ORCHESTRATOR_LEDGER_IO_HPP_

#include <filesystem>
#include <string>

#include "glp/core/ledger.hpp"

namespace glp {

std::string serialize_ledger(const PruneLedger& ledger);

// Throws FormatError on malformed JSON, missing fields or an unsupported
// schema version (the offset then points at the version field).
PruneLedger parse_ledger(const std::string& text);

// Writes to a sibling temporary file and renames it over `path`, so readers
// see either the old or the new ledger.
void write_ledger(const std::filesystem::path& path, const PruneLedger& ledger);
PruneLedger read_ledger(const std::filesystem::path& path);

}  // namespace glp

#endif  // GLP_ORCHESTRATOR_LEDGER_IO_HPP_
