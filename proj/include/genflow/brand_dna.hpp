// Copyright 2026 The Genflow Authors
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
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "genflow/common.hpp"
#include "genflow/digest.hpp"
#include "genflow/errors.hpp"
#include "genflow/random.hpp"
#include "genflow/types.hpp"

namespace genflow {

class ExtractorBackend;
class RunContext;

struct RawSite {
    std::string url;
    std::string html;
    std::vector<std::string> stylesheets;  // document order, inline and linked
};

struct FetchPolicy {
    std::chrono::milliseconds timeout{10000};
    std::size_t max_bytes = 4 * 1024 * 1024;
    std::size_t max_linked_sheets = 16;
    std::filesystem::path fixture_dir = "fixtures";
};

/// Typed brand constraint document.
struct BrandDNA {
    std::vector<std::string> palette;
    std::vector<std::string> typography;
    std::vector<std::string> tonal_voice;
    std::vector<std::string> forbidden_tropes;
    std::string source_url;

    bool operator==(const BrandDNA&) const = default;
};

/// Canonical serialization (fixed key order). Also the input to digest().
Json to_json(const BrandDNA& dna);
Digest digest_of(const BrandDNA& dna);

class ParseExhaustedError : public Error {
public:
    ParseExhaustedError(std::string what, int attempts, std::vector<SchemaViolation> violations)
        : Error(ErrorCode::ParseExhausted, what), attempts_(attempts), violations_(std::move(violations)) {}

    [[nodiscard]] int attempts() const noexcept { return attempts_; }
    [[nodiscard]] const std::vector<SchemaViolation>& violations() const noexcept { return violations_; }

private:
    int attempts_;
    std::vector<SchemaViolation> violations_;
};

/// Loads a site from `fixture:<site>[/<page>]` (resolved against
/// policy.fixture_dir) or from an http(s) URL.
/// Throws NetworkError, SizeExceeded or NotHtml.
RawSite fetch_site(const std::string& url, const FetchPolicy& policy);

/// Colors from every stylesheet (in order) and then every style attribute
/// (in document order), ranked by count with first-appearance tie-break.
/// Throws EmptyPalette when no color literal exists.
std::vector<std::string> extract_palette(const RawSite& site);

std::vector<std::string> extract_typography(const RawSite& site);

using SchemaResult = std::variant<BrandDNA, std::vector<SchemaViolation>>;

SchemaResult validate_schema(const Json& candidate);

/// Deterministic palette/typography plus extractor-provided tone and tropes,
/// validated; invalid candidates are sent back to the extractor with the
/// violation list up to `repair_budget` times. Throws ParseExhaustedError.
/// Draws for attempt k come from stream.child("attempt", k).
BrandDNA build_brand_dna(const RawSite& site, ExtractorBackend& extractor, int repair_budget, Stream stream,
                         RunContext* ctx = nullptr);

/// Reads a `.branddna.json` document; throws InvalidRequest with the
/// violation list when it does not validate.
BrandDNA load_brand_dna(const std::filesystem::path& path);

}  // namespace genflow
