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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

/// Minimal CSS and HTML scanning: just enough structure to find declaration
/// values, without evaluating the cascade.
namespace genflow::css {

struct Declaration {
    std::string property;  // lowercased
    std::string value;     // trimmed, comments removed
};

/// Declarations from a stylesheet, in source order. Nested blocks
/// (@media, @supports, CSS nesting) are flattened.
std::vector<Declaration> declarations(std::string_view stylesheet);

/// Normalized colors (uppercase #RRGGBB) found in one declaration value, in
/// order of appearance. Accepts #RGB, #RRGGBB and rgb(r, g, b) with integer,
/// decimal or percentage channels; out-of-range channels are clamped.
std::vector<std::string> color_literals(std::string_view value);

/// Expands #RGB, uppercases, validates. Returns nullopt for anything that is
/// not a 3- or 6-digit hex color.
std::optional<std::string> normalize_hex(std::string_view literal);

/// First family of a font-family value with quotes stripped. Returns nullopt
/// for var() references and CSS-wide keywords.
std::optional<std::string> first_font_family(std::string_view value);

bool is_generic_family(std::string_view family);

struct StyleSource {
    enum class Kind { linked, inline_block };
    Kind kind;
    std::string content;  // href for linked sheets, CSS text for <style> blocks
};

struct HtmlStyles {
    std::vector<StyleSource> sources;          // document order
    std::vector<std::string> style_attributes;  // document order
};

HtmlStyles scan_html(std::string_view html);

}  // namespace genflow::css
