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
#include "genflow/css.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <charconv>

#include <fmt/format.h>

namespace genflow::css {
namespace {

bool is_ident_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '-' || c == '_';
}

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view prefix) {
    if (text.size() - pos < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i]) return false;
    }
    return true;
}

std::string strip_comments(std::string_view css) {
    std::string out;
    out.reserve(css.size());
    std::size_t i = 0;
    char quote = 0;
    while (i < css.size()) {
        char c = css[i];
        if (quote) {
            out += c;
            if (c == '\\' && i + 1 < css.size()) {
                out += css[++i];
            } else if (c == quote) {
                quote = 0;
            }
            ++i;
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
            out += c;
            ++i;
        } else if (c == '/' && i + 1 < css.size() && css[i + 1] == '*') {
            auto close = css.find("*/", i + 2);
            i = close == std::string_view::npos ? css.size() : close + 2;
            out += ' ';
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

// Index just past the string starting at `i` (which holds the quote).
std::size_t skip_string(std::string_view s, std::size_t i) {
    char quote = s[i++];
    while (i < s.size() && s[i] != quote) {
        if (s[i] == '\\') ++i;
        ++i;
    }
    return std::min(i + 1, s.size());
}

// Index of the '}' matching the '{' at `open`, or s.size().
std::size_t matching_brace(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' || c == '\'') {
            i = skip_string(s, i) - 1;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return s.size();
}

bool valid_property(std::string_view p) {
    if (p.empty() || p.front() == '@') return false;
    return std::all_of(p.begin(), p.end(), is_ident_char);
}

void push_declaration(std::string_view segment, std::vector<Declaration>& out) {
    auto colon = segment.find(':');
    if (colon == std::string_view::npos) return;
    auto prop = trim(segment.substr(0, colon));
    if (!valid_property(prop)) return;
    out.push_back({lower(prop), std::string(trim(segment.substr(colon + 1)))});
}

void parse_block(std::string_view s, std::vector<Declaration>& out) {
    std::size_t start = 0;
    int paren = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '"' || c == '\'') {
            i = skip_string(s, i);
            continue;
        }
        if (c == '(') {
            ++paren;
        } else if (c == ')') {
            paren = std::max(0, paren - 1);
        } else if (paren == 0 && c == ';') {
            push_declaration(s.substr(start, i - start), out);
            start = i + 1;
        } else if (paren == 0 && c == '{') {
            auto close = matching_brace(s, i);
            parse_block(s.substr(i + 1, close - i - 1), out);
            i = close + 1;
            start = i;
            continue;
        } else if (paren == 0 && c == '}') {
            // Stray close brace: drop the pending segment.
            start = i + 1;
        }
        ++i;
    }
    if (start < s.size()) push_declaration(s.substr(start), out);
}

std::optional<int> parse_channel(std::string_view token) {
    token = trim(token);
    if (token.empty()) return std::nullopt;
    bool percent = token.back() == '%';
    if (percent) token.remove_suffix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    if (percent) v = v * 255.0 / 100.0;
    v = std::clamp(v, 0.0, 255.0);
    return static_cast<int>(std::lround(v));
}

// Parses the argument list of rgb(...) into a color, or nullopt.
std::optional<std::string> parse_rgb_args(std::string_view args) {
    // Alpha after '/' is ignored.
    if (auto slash = args.find('/'); slash != std::string_view::npos) args = args.substr(0, slash);
    std::vector<std::string_view> parts;
    bool commas = args.find(',') != std::string_view::npos;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= args.size(); ++i) {
        bool sep = i == args.size() ||
                   (commas ? args[i] == ',' : std::isspace(static_cast<unsigned char>(args[i])) != 0);
        if (sep) {
            auto part = trim(args.substr(start, i - start));
            if (!part.empty() || commas) parts.push_back(part);
            start = i + 1;
        }
    }
    // A fourth comma-separated value is legacy rgba() alpha.
    if (commas && parts.size() == 4) parts.pop_back();
    if (parts.size() != 3) return std::nullopt;
    std::array<int, 3> rgb{};
    for (std::size_t k = 0; k < 3; ++k) {
        auto ch = parse_channel(parts[k]);
        if (!ch) return std::nullopt;
        rgb[k] = *ch;
    }
    return fmt::format("#{:02X}{:02X}{:02X}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

std::vector<Declaration> declarations(std::string_view stylesheet) {
    std::vector<Declaration> out;
    auto clean = strip_comments(stylesheet);
    parse_block(clean, out);
    return out;
}

std::optional<std::string> normalize_hex(std::string_view literal) {
    if (literal.empty() || literal.front() != '#') return std::nullopt;
    literal.remove_prefix(1);
    if ((literal.size() != 3 && literal.size() != 6) || !std::all_of(literal.begin(), literal.end(), is_hex)) {
        return std::nullopt;
    }
    std::string out = "#";
    for (char c : literal) {
        char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out += u;
        if (literal.size() == 3) out += u;
    }
    return out;
}

std::vector<std::string> color_literals(std::string_view value) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < value.size()) {
        char c = value[i];
        if (c == '"' || c == '\'') {
            i = skip_string(value, i);
            continue;
        }
        bool boundary = i == 0 || !is_ident_char(value[i - 1]);
        if (boundary && iequals_prefix(value, i, "url(")) {
            auto close = value.find(')', i);
            i = close == std::string_view::npos ? value.size() : close + 1;
            continue;
        }
        if (c == '#') {
            std::size_t j = i + 1;
            while (j < value.size() && is_hex(value[j])) ++j;
            bool terminated = j == value.size() || !is_ident_char(value[j]);
            if (terminated) {
                if (auto hex = normalize_hex(value.substr(i, j - i))) out.push_back(*hex);
            }
            i = j;
            continue;
        }
        const bool rgba = boundary && iequals_prefix(value, i, "rgba(");
        if (rgba || (boundary && iequals_prefix(value, i, "rgb("))) {
            auto close = value.find(')', i);
            if (close == std::string_view::npos) break;
            const std::size_t open = i + (rgba ? 5 : 4);
            if (auto color = parse_rgb_args(value.substr(open, close - open))) out.push_back(*color);
            i = close + 1;
            continue;
        }
        ++i;
    }
    return out;
}

bool is_generic_family(std::string_view family) {
    static constexpr std::array<std::string_view, 12> kGeneric = {
        "serif", "sans-serif", "monospace", "cursive", "fantasy", "system-ui",
        "ui-serif", "ui-sans-serif", "ui-monospace", "ui-rounded", "math", "emoji"};
    auto l = lower(family);
    return std::find(kGeneric.begin(), kGeneric.end(), l) != kGeneric.end();
}

std::optional<std::string> first_font_family(std::string_view value) {
    // Cut at the first top-level comma.
    std::size_t end = value.size();
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (value[i] == '"' || value[i] == '\'') {
            i = skip_string(value, i) - 1;
        } else if (value[i] == ',') {
            end = i;
            break;
        }
    }
    auto first = trim(value.substr(0, end));
    if (auto bang = first.find("!important"); bang != std::string_view::npos) first = trim(first.substr(0, bang));
    if (first.empty()) return std::nullopt;
    std::string name;
    if (first.front() == '"' || first.front() == '\'') {
        auto close = skip_string(first, 0);
        name = std::string(first.substr(1, close >= 2 ? close - 2 : 0));
    } else {
        // Unquoted family names collapse internal whitespace.
        bool space = false;
        for (char c : first) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                space = true;
            } else {
                if (space && !name.empty()) name += ' ';
                space = false;
                name += c;
            }
        }
        auto l = lower(name);
        if (l.starts_with("var(") || l == "inherit" || l == "initial" || l == "unset" || l == "revert" ||
            l == "revert-layer") {
            return std::nullopt;
        }
    }
    name = std::string(trim(name));
    if (name.empty()) return std::nullopt;
    return name;
}

namespace {

std::string decode_entities(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '&') {
            static constexpr std::array<std::pair<std::string_view, char>, 5> kEntities = {
                {{"&quot;", '"'}, {"&amp;", '&'}, {"&#39;", '\''}, {"&lt;", '<'}, {"&gt;", '>'}}};
            bool matched = false;
            for (auto [ent, ch] : kEntities) {
                if (s.substr(i, ent.size()) == ent) {
                    out += ch;
                    i += ent.size() - 1;
                    matched = true;
                    break;
                }
            }
            if (!matched) out += s[i];
        } else {
            out += s[i];
        }
    }
    return out;
}

struct Tag {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::size_t end = 0;  // index just past '>'

    [[nodiscard]] const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attributes) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

Tag read_tag(std::string_view html, std::size_t lt) {
    Tag tag;
    std::size_t i = lt + 1;
    while (i < html.size() && is_ident_char(html[i])) tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
    while (i < html.size() && html[i] != '>') {
        auto ch = static_cast<unsigned char>(html[i]);
        if (std::isspace(ch) || html[i] == '/') {
            ++i;
            continue;
        }
        std::string key;
        while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '=' &&
               html[i] != '>' && html[i] != '/') {
            key += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
        }
        std::string value;
        while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
        if (i < html.size() && html[i] == '=') {
            ++i;
            while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
            if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
                char q = html[i++];
                auto close = html.find(q, i);
                if (close == std::string_view::npos) close = html.size();
                value = decode_entities(html.substr(i, close - i));
                i = std::min(close + 1, html.size());
            } else {
                while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '>') {
                    value += html[i++];
                }
            }
        }
        if (!key.empty()) tag.attributes.emplace_back(std::move(key), std::move(value));
    }
    tag.end = std::min(i + 1, html.size());
    return tag;
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        if (iequals_prefix(hay, i, needle)) return i;
    }
    return std::string_view::npos;
}

bool has_token(std::string_view list, std::string_view token) {
    auto l = lower(list);
    std::size_t start = 0;
    while (start < l.size()) {
        auto end = l.find_first_of(" \t\n\r", start);
        if (end == std::string::npos) end = l.size();
        if (std::string_view(l).substr(start, end - start) == token) return true;
        start = end + 1;
    }
    return false;
}

}  // namespace

HtmlStyles scan_html(std::string_view html) {
    HtmlStyles out;
    std::size_t i = 0;
    while ((i = html.find('<', i)) != std::string_view::npos) {
        if (html.substr(i, 4) == "<!--") {
            auto close = html.find("-->", i + 4);
            i = close == std::string_view::npos ? html.size() : close + 3;
            continue;
        }
        if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?' || html[i + 1] == '/')) {
            auto close = html.find('>', i);
            i = close == std::string_view::npos ? html.size() : close + 1;
            continue;
        }
        if (i + 1 >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i + 1]))) {
            ++i;
            continue;
        }
        Tag tag = read_tag(html, i);
        if (const auto* style = tag.attr("style")) out.style_attributes.push_back(*style);
        i = tag.end;
        if (tag.name == "style" || tag.name == "script") {
            auto close = find_ci(html, tag.name == "style" ? "</style" : "</script", i);
            if (close == std::string_view::npos) close = html.size();
            if (tag.name == "style") {
                out.sources.push_back({StyleSource::Kind::inline_block, std::string(html.substr(i, close - i))});
            }
            i = close;
        } else if (tag.name == "link") {
            const auto* rel = tag.attr("rel");
            const auto* href = tag.attr("href");
            if (rel && href && has_token(*rel, "stylesheet") && !href->empty()) {
                out.sources.push_back({StyleSource::Kind::linked, *href});
            }
        }
    }
    return out;
}

}  // namespace genflow::css
