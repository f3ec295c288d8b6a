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
#include <gtest/gtest.h>

#include "genflow/css.hpp"

namespace genflow::css {
namespace {

using Colors = std::vector<std::string>;

TEST(ColorLiterals, RgbCommaForm) { EXPECT_EQ(color_literals("rgb(255,0,0)"), Colors{"#FF0000"}); }

TEST(ColorLiterals, RgbSpaceAndPercentForms) {
    EXPECT_EQ(color_literals("rgb(15 52 96)"), Colors{"#0F3460"});
    EXPECT_EQ(color_literals("rgb(100%, 0%, 50%)"), Colors{"#FF0080"});
    EXPECT_EQ(color_literals("rgba(0, 0, 255, 0.5)"), Colors{"#0000FF"});
}

TEST(ColorLiterals, RgbClampsOutOfRangeChannels) { EXPECT_EQ(color_literals("rgb(300, -5, 10)"), Colors{"#FF000A"}); }

TEST(ColorLiterals, ShortHexExpands) {
    EXPECT_EQ(color_literals("#fff"), Colors{"#FFFFFF"});
    EXPECT_EQ(color_literals("1px solid #a1B"), Colors{"#AA11BB"});
}

TEST(ColorLiterals, RejectsNonColorHashes) {
    EXPECT_TRUE(color_literals("#GGG123").empty());
    EXPECT_TRUE(color_literals("#12345").empty());
    EXPECT_TRUE(color_literals("#1234567").empty());
}

TEST(ColorLiterals, SkipsStringsAndUrls) {
    EXPECT_TRUE(color_literals("url(img/#bad.png)").empty());
    EXPECT_TRUE(color_literals("\"#C0FFEE\"").empty());
    EXPECT_EQ(color_literals("url('a#fff.png') #000"), Colors{"#000000"});
}

TEST(ColorLiterals, KeepsDocumentOrder) {
    EXPECT_EQ(color_literals("linear-gradient(#111, rgb(2,2,2), #333333)"),
              (Colors{"#111111", "#020202", "#333333"}));
}

TEST(Declarations, StripsCommentsAndFlattensBlocks) {
    auto decls = declarations(R"(/* color: #123456 */
        @media (min-width: 1px) { .a { color: #abcdef; } }
        .b { Background : red ; font-family: serif }
    )");
    ASSERT_EQ(decls.size(), 3u);
    EXPECT_EQ(decls[0].property, "color");
    EXPECT_EQ(decls[0].value, "#abcdef");
    EXPECT_EQ(decls[1].property, "background");
    EXPECT_EQ(decls[1].value, "red");
    EXPECT_EQ(decls[2].property, "font-family");
}

TEST(Declarations, InlineStyleAttributeText) {
    auto decls = declarations("color:#fff; border-top: 4px solid #0f3460");
    ASSERT_EQ(decls.size(), 2u);
    EXPECT_EQ(decls[1].property, "border-top");
}

TEST(FontFamily, FirstFamilyUnquoted) {
    EXPECT_EQ(first_font_family("\"Helvetica Neue\", Arial, sans-serif"), "Helvetica Neue");
    EXPECT_EQ(first_font_family("'Playfair Display', serif"), "Playfair Display");
    EXPECT_EQ(first_font_family("serif"), "serif");
    EXPECT_FALSE(first_font_family("  ").has_value());
}

TEST(FontFamily, GenericNames) {
    EXPECT_TRUE(is_generic_family("serif"));
    EXPECT_TRUE(is_generic_family("sans-serif"));
    EXPECT_TRUE(is_generic_family("system-ui"));
    EXPECT_FALSE(is_generic_family("Inter"));
}

TEST(ScanHtml, SourcesInDocumentOrder) {
    auto styles = scan_html(R"(<html><head>
        <link rel="stylesheet" href="a.css">
        <style>.x{color:#000}</style>
        <link href="b.css" rel="stylesheet">
        <link rel="icon" href="favicon.ico">
        </head><body style="color:#fff"><p style='margin:0'>x</p></body></html>)");
    ASSERT_EQ(styles.sources.size(), 3u);
    EXPECT_EQ(styles.sources[0].kind, StyleSource::Kind::linked);
    EXPECT_EQ(styles.sources[0].content, "a.css");
    EXPECT_EQ(styles.sources[1].kind, StyleSource::Kind::inline_block);
    EXPECT_EQ(styles.sources[2].content, "b.css");
    ASSERT_EQ(styles.style_attributes.size(), 2u);
    EXPECT_EQ(styles.style_attributes[0], "color:#fff");
}

}  // namespace
}  // namespace genflow::css
