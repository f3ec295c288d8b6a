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

#include <deque>

#include "genflow/backends.hpp"
#include "genflow/errors.hpp"
#include "genflow/run_context.hpp"
#include "genflow/script.hpp"
#include "genflow/sim_backend.hpp"
#include "test_support.hpp"

namespace genflow {
namespace {

Json scene_json(int index) {
    auto s = testing::sample_scene();
    s.index = index;
    return to_json(s);
}

Json matrix_json(int n) {
    Json scenes = Json::array();
    for (int i = 0; i < n; ++i) scenes.push_back(scene_json(i));
    return Json{{"objective", "launch"}, {"dna_ref", digest_of(testing::sample_dna()).hex()}, {"scenes", scenes}};
}

std::vector<SchemaViolation> violations_of(const Json& j) {
    auto r = validate_matrix(j);
    if (auto* v = std::get_if<std::vector<SchemaViolation>>(&r)) return *v;
    return {};
}

class ScriptedDirector final : public DirectorBackend {
public:
    explicit ScriptedDirector(std::deque<std::string> replies) : replies_(std::move(replies)) {}
    std::string author(const DirectorRequest& req, Stream) override {
        attempts.push_back(req.attempt);
        feedback_sizes.push_back(req.feedback.size());
        auto r = replies_.front();
        if (replies_.size() > 1) replies_.pop_front();
        return r;
    }
    std::vector<int> attempts;
    std::vector<std::size_t> feedback_sizes;

private:
    std::deque<std::string> replies_;
};

TEST(ValidateMatrix, AcceptsWellFormedMatrix) {
    auto r = validate_matrix(matrix_json(3));
    ASSERT_TRUE(std::holds_alternative<ScriptMatrix>(r));
    EXPECT_EQ(std::get<ScriptMatrix>(r).scenes.size(), 3u);
    EXPECT_EQ(to_json(std::get<ScriptMatrix>(r)), matrix_json(3));
}

TEST(ValidateMatrix, FocalLengthRange) {
    auto j = matrix_json(2);
    j["scenes"][1]["focal_length_mm"] = 500.0;
    auto v = violations_of(j);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].field_path, "scenes[1].focal_length_mm");
    EXPECT_EQ(v[0].rule, "range");
    j["scenes"][1]["focal_length_mm"] = kMinFocalLengthMm;
    EXPECT_TRUE(violations_of(j).empty());
}

TEST(ValidateMatrix, EnumMotionAndDuration) {
    auto j = matrix_json(1);
    j["scenes"][0]["camera_angle"] = "dutch";
    j["scenes"][0]["lighting"] = 3;
    j["scenes"][0]["motion_vector"] = {0.5, 1.5};
    j["scenes"][0]["duration_s"] = 0.0;
    auto v = violations_of(j);
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0].rule, "enum");
    EXPECT_EQ(v[1].rule, "enum");
    EXPECT_EQ(v[2].field_path, "scenes[0].motion_vector");
    EXPECT_EQ(v[2].rule, "range");
    EXPECT_EQ(v[3].field_path, "scenes[0].duration_s");
}

TEST(ValidateMatrix, DurationUpperBound) {
    auto j = matrix_json(1);
    j["scenes"][0]["duration_s"] = kMaxSceneDurationS + 0.01;
    ASSERT_EQ(violations_of(j).size(), 1u);
}

TEST(ValidateMatrix, NonContiguousIndices) {
    auto j = matrix_json(3);
    j["scenes"][2]["index"] = 5;
    auto v = violations_of(j);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "contiguous-indices");
}

TEST(ValidateMatrix, MissingFields) {
    auto j = matrix_json(1);
    j["scenes"][0].erase("prompt");
    j.erase("dna_ref");
    auto v = violations_of(j);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].field_path, "dna_ref");
    EXPECT_EQ(v[1].field_path, "scenes[0].prompt");
    EXPECT_EQ(v[1].rule, "required");
}

TEST(ValidateMatrix, EmptyScenesAndBadDigest) {
    auto j = matrix_json(1);
    j["scenes"] = Json::array();
    j["dna_ref"] = "XYZ";
    auto v = violations_of(j);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].rule, "digest-format");
    EXPECT_EQ(v[1].rule, "non-empty");
}

TEST(AuthorScript, SimDirectorProducesRequestedScenes) {
    sim::SimDirector director(testing::clean_params());
    auto dna = testing::sample_dna();
    auto m = author_script(dna, "Spring launch", 5, director, 1, Stream(3));
    ASSERT_EQ(m.scenes.size(), 5u);
    EXPECT_EQ(m.objective, "Spring launch");
    EXPECT_EQ(m.dna_ref, digest_of(dna));
    for (std::size_t i = 0; i < m.scenes.size(); ++i) {
        EXPECT_EQ(m.scenes[i].index, static_cast<int>(i));
        EXPECT_NE(m.scenes[i].prompt.find("Spring launch"), std::string::npos);
    }
    EXPECT_EQ(m, author_script(dna, "Spring launch", 5, director, 1, Stream(3)));
}

TEST(AuthorScript, WrongSceneCountTriggersRepair) {
    ScriptedDirector director({matrix_json(2).dump(), matrix_json(3).dump()});
    EventBus bus;
    bus.open_run("r");
    RunContext ctx("r", CostModel::defaults(), &bus);
    auto m = author_script(testing::sample_dna(), "launch", 3, director, 1, Stream(1), &ctx);
    EXPECT_EQ(m.scenes.size(), 3u);
    EXPECT_EQ(director.attempts, (std::vector<int>{0, 1}));
    EXPECT_EQ(director.feedback_sizes, (std::vector<std::size_t>{0, 1}));
    auto events = bus.events("r");
    ASSERT_EQ(events.size(), 3u);
    EXPECT_EQ(events[1].kind, EventKind::repair);
    EXPECT_EQ(events[1].payload["violations"][0]["rule"], "scene-count");
}

TEST(AuthorScript, ExhaustionCarriesAttemptsAndViolations) {
    ScriptedDirector director({"{\"scenes\": ["});
    try {
        author_script(testing::sample_dna(), "launch", 1, director, 2, Stream(1));
        FAIL();
    } catch (const ParseExhaustedError& e) {
        EXPECT_EQ(e.attempts(), 3);
        EXPECT_EQ(e.code(), ErrorCode::ParseExhausted);
        ASSERT_EQ(e.violations().size(), 1u);
        EXPECT_EQ(e.violations()[0].rule, "json-syntax");
    }
}

TEST(AuthorScript, RejectsBadArguments) {
    sim::SimDirector director(testing::clean_params());
    EXPECT_THROW(author_script(testing::sample_dna(), "", 1, director, 1, Stream(1)), Error);
    EXPECT_THROW(author_script(testing::sample_dna(), "x", 0, director, 1, Stream(1)), Error);
    EXPECT_THROW(author_script(testing::sample_dna(), "x", 1, director, -1, Stream(1)), Error);
}

TEST(AuthorScript, AlwaysMalformedExhausts) {
    auto p = testing::clean_params();
    p.malformed_rate = 1.0;
    sim::SimDirector director(p);
    EXPECT_THROW(author_script(testing::sample_dna(), "x", 2, director, 1, Stream(1)), ParseExhaustedError);
}

TEST(AuthorScript, RepairRaisesSuccessRate) {
    sim::SimParams p = testing::clean_params();
    p.malformed_rate = 0.3;
    sim::SimDirector director(p);
    int ok0 = 0;
    int ok1 = 0;
    constexpr int kTrials = 2000;
    for (int i = 0; i < kTrials; ++i) {
        Stream s(static_cast<std::uint64_t>(i));
        try {
            author_script(testing::sample_dna(), "x", 1, director, 0, s);
            ++ok0;
        } catch (const ParseExhaustedError&) {
        }
        try {
            author_script(testing::sample_dna(), "x", 1, director, 1, s);
            ++ok1;
        } catch (const ParseExhaustedError&) {
        }
    }
    // Expected 0.70 and 0.91 with sigma near 0.010 and 0.006.
    EXPECT_NEAR(ok0 / double(kTrials), 0.70, 0.04);
    EXPECT_NEAR(ok1 / double(kTrials), 0.91, 0.025);
}

TEST(MatrixFromJson, ThrowsInvalidRequest) {
    try {
        matrix_from_json(Json{{"scenes", 1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidRequest);
    }
}

}  // namespace
}  // namespace genflow
