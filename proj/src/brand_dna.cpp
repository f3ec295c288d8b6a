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
#include "genflow/brand_dna.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "genflow/backends.hpp"
#include "genflow/css.hpp"
#include "genflow/run_context.hpp"

namespace genflow {

Json to_json(const BrandDNA& dna) {
    return Json{{"palette", dna.palette},
                {"typography", dna.typography},
                {"tonal_voice", dna.tonal_voice},
                {"forbidden_tropes", dna.forbidden_tropes},
                {"source_url", dna.source_url}};
}

Digest digest_of(const BrandDNA& dna) { return digest_bytes(to_json(dna).dump()); }

std::vector<std::string> extract_palette(const RawSite& site) {
    struct Entry {
        std::size_t count = 0;
        std::size_t first = 0;
    };
    std::unordered_map<std::string, Entry> seen;
    std::vector<std::string> order;
    auto record = [&](const std::string& color) {
        auto [it, inserted] = seen.try_emplace(color, Entry{0, order.size()});
        if (inserted) order.push_back(color);
        ++it->second.count;
    };
    auto scan = [&](const std::vector<css::Declaration>& decls) {
        for (const auto& d : decls) {
            for (const auto& c : css::color_literals(d.value)) record(c);
        }
    };
    for (const auto& sheet : site.stylesheets) scan(css::declarations(sheet));
    for (const auto& attr : css::scan_html(site.html).style_attributes) scan(css::declarations(attr));

    if (order.empty()) {
        throw Error(ErrorCode::EmptyPalette, fmt::format("no color literals found in {}", site.url));
    }
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        const auto& ea = seen.at(a);
        const auto& eb = seen.at(b);
        if (ea.count != eb.count) return ea.count > eb.count;
        return ea.first < eb.first;
    });
    return order;
}

std::vector<std::string> extract_typography(const RawSite& site) {
    std::vector<std::string> families;
    std::vector<std::string> generics;
    auto add_unique = [](std::vector<std::string>& list, std::string name) {
        if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(std::move(name));
    };
    auto scan = [&](const std::vector<css::Declaration>& decls) {
        for (const auto& d : decls) {
            if (d.property != "font-family") continue;
            auto family = css::first_font_family(d.value);
            if (!family) continue;
            if (css::is_generic_family(*family)) {
                add_unique(generics, *family);
            } else {
                add_unique(families, *family);
            }
        }
    };
    for (const auto& sheet : site.stylesheets) scan(css::declarations(sheet));
    for (const auto& attr : css::scan_html(site.html).style_attributes) scan(css::declarations(attr));
    return families.empty() ? generics : families;
}

namespace {

const std::regex& hex_color_re() {
    static const std::regex re("^#[0-9A-F]{6}$");
    return re;
}

std::string excerpt(const Json& value) {
    auto text = value.dump();
    if (text.size() > 80) text = text.substr(0, 77) + "...";
    return text;
}

// Appends violations for a string-list field and returns the parsed list.
std::vector<std::string> check_string_list(const Json& doc, const char* field, bool require_non_empty,
                                           std::vector<SchemaViolation>& out) {
    std::vector<std::string> list;
    if (!doc.contains(field)) {
        out.push_back({field, "required", ""});
        return list;
    }
    const auto& value = doc.at(field);
    if (!value.is_array()) {
        out.push_back({field, "type", excerpt(value)});
        return list;
    }
    if (require_non_empty && value.empty()) out.push_back({field, "non-empty", "[]"});
    for (std::size_t i = 0; i < value.size(); ++i) {
        auto path = fmt::format("{}[{}]", field, i);
        if (!value[i].is_string()) {
            out.push_back({path, "type", excerpt(value[i])});
            continue;
        }
        auto s = value[i].get<std::string>();
        if (s.empty()) {
            out.push_back({path, "non-empty", "\"\""});
            continue;
        }
        list.push_back(std::move(s));
    }
    return list;
}

}  // namespace

SchemaResult validate_schema(const Json& candidate) {
    std::vector<SchemaViolation> violations;
    if (!candidate.is_object()) {
        violations.push_back({"$", "type", excerpt(candidate)});
        return violations;
    }
    BrandDNA dna;
    dna.palette = check_string_list(candidate, "palette", true, violations);
    if (candidate.contains("palette") && candidate["palette"].is_array()) {
        std::set<std::string> seen;
        const auto& raw = candidate["palette"];
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!raw[i].is_string()) continue;
            auto s = raw[i].get<std::string>();
            if (s.empty()) continue;
            auto path = fmt::format("palette[{}]", i);
            if (!std::regex_match(s, hex_color_re())) {
                violations.push_back({path, "hex-format", s});
            } else if (!seen.insert(s).second) {
                violations.push_back({path, "duplicate", s});
            }
        }
    }
    dna.typography = check_string_list(candidate, "typography", true, violations);
    dna.tonal_voice = check_string_list(candidate, "tonal_voice", false, violations);
    dna.forbidden_tropes = check_string_list(candidate, "forbidden_tropes", false, violations);
    if (!candidate.contains("source_url")) {
        violations.push_back({"source_url", "required", ""});
    } else if (!candidate["source_url"].is_string()) {
        violations.push_back({"source_url", "type", excerpt(candidate["source_url"])});
    } else {
        dna.source_url = candidate["source_url"].get<std::string>();
    }
    if (!violations.empty()) return violations;
    return dna;
}

BrandDNA build_brand_dna(const RawSite& site, ExtractorBackend& extractor, int repair_budget, Stream stream,
                         RunContext* ctx) {
    if (repair_budget < 0) throw Error(ErrorCode::InvalidRequest, "repair_budget must be >= 0");
    auto palette = extract_palette(site);
    auto typography = extract_typography(site);

    std::vector<SchemaViolation> feedback;
    for (int attempt = 0; attempt <= repair_budget; ++attempt) {
        auto text = extractor.extract(site, feedback, attempt, stream.child("attempt", attempt));
        std::vector<SchemaViolation> violations;
        std::optional<BrandDNA> dna;

        auto candidate = Json::parse(text, nullptr, false);
        if (candidate.is_discarded()) {
            violations.push_back({"$", "json-syntax", text.substr(0, 80)});
        } else {
            if (candidate.is_object()) {
                candidate["palette"] = palette;
                candidate["typography"] = typography;
                candidate["source_url"] = site.url;
            }
            auto result = validate_schema(candidate);
            if (auto* ok = std::get_if<BrandDNA>(&result)) {
                dna = std::move(*ok);
            } else {
                violations = std::move(std::get<std::vector<SchemaViolation>>(result));
            }
        }
        if (ctx) {
            ctx->emit_call(CallKind::extractor, AgentRole::director_llm, EventKind::generation,
                           Json{{"call", "extractor"}, {"attempt", attempt}, {"valid", dna.has_value()}});
        }
        if (dna) {
            // Canonical order for the list fields owned by the extractor.
            auto dedupe = [](std::vector<std::string>& v) {
                std::vector<std::string> out;
                for (auto& s : v) {
                    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
                }
                v = std::move(out);
            };
            dedupe(dna->tonal_voice);
            dedupe(dna->forbidden_tropes);
            return *dna;
        }
        if (ctx) {
            ctx->emit(AgentRole::director_llm, EventKind::repair,
                      Json{{"target", "brand_dna"}, {"attempt", attempt}, {"violations", violations},
                           {"will_retry", attempt < repair_budget}});
        }
        feedback = std::move(violations);
    }
    throw ParseExhaustedError(
        fmt::format("brand DNA extraction produced no valid document after {} attempts", repair_budget + 1),
        repair_budget + 1, feedback);
}

BrandDNA load_brand_dna(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    auto doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::InvalidRequest, fmt::format("{} is not valid JSON", path.string()));
    auto result = validate_schema(doc);
    if (auto* dna = std::get_if<BrandDNA>(&result)) return *dna;
    const auto& violations = std::get<std::vector<SchemaViolation>>(result);
    std::string msg = fmt::format("{} is not a valid brand DNA document:", path.string());
    for (const auto& v : violations) msg += fmt::format(" {}({})", v.field_path, v.rule);
    throw Error(ErrorCode::InvalidRequest, msg);
}

}  // namespace genflow
