#include "motioneval/errors.h"
#include "motioneval/ratings.h"

#include "test_util.h"

#include <gtest/gtest.h>

#include <fstream>

namespace motioneval {
namespace {

TEST(Ratings, ParsesRowsInFileOrder) {
  const auto r = parseRatingsCsv("0,MDM,17,3.5,2.0,a person walks forward\n"
                                 "1,HumanML3D,17,4,4,a person walks forward\r\n");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].restrictedIndex, 0);
  EXPECT_EQ(r[0].modelName, "MDM");
  EXPECT_EQ(r[0].originalIndex, 17);
  EXPECT_EQ(r[0].naturalness, 3.5);
  EXPECT_EQ(r[0].faithfulness, 2.0);
  EXPECT_EQ(r[0].prompt, "a person walks forward");
  EXPECT_EQ(r[1].rating(RatingKind::Faithfulness), 4.0);
  EXPECT_EQ(modelNames(r), (std::vector<std::string>{"MDM", "HumanML3D"}));
  EXPECT_EQ(ratingValues(r, RatingKind::Naturalness), (std::vector<double>{3.5, 4.0}));
}

TEST(Ratings, HeaderRowIsSkipped) {
  const auto r = parseRatingsCsv("restricted_index,model_name,original_index,naturalness,"
                                 "faithfulness,prompt\n2,TM2T,5,1,0,jumps\n");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].modelName, "TM2T");
}

TEST(Ratings, PromptsWithCommas) {
  const auto quoted = parseRatingsCsv("0,MDM,1,2,2,\"walks, then \"\"turns\"\"\"\n");
  EXPECT_EQ(quoted[0].prompt, "walks, then \"turns\"");
  const auto bare = parseRatingsCsv("0,MDM,1,2,2,walks, then turns, then sits\n");
  EXPECT_EQ(bare[0].prompt, "walks, then turns, then sits");
}

TEST(Ratings, OutOfRangeRatingNamesTheLine) {
  try {
    parseRatingsCsv("0,MDM,1,2,2,ok\n1,MDM,2,4.7,2,bad\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("4.7"), std::string::npos);
  }
  EXPECT_THROW(parseRatingsCsv("0,MDM,1,2,-0.5,x\n"), FormatError);
}

TEST(Ratings, SchemaViolations) {
  EXPECT_THROW(parseRatingsCsv("0,MDM,1,2\n"), FormatError);
  EXPECT_THROW(parseRatingsCsv("0,GPT,1,2,2,x\n"), FormatError);
  EXPECT_THROW(parseRatingsCsv("0,MDM,one,2,2,x\n"), FormatError);
  EXPECT_THROW(parseRatingsCsv("0,MDM,1,good,2,x\n"), FormatError);
  EXPECT_THROW(parseRatingsCsv("0,MDM,1,2,2,x\nz,MDM,1,2,2,x\n"), FormatError);
}

TEST(Ratings, EmptyInputIsDataError) {
  EXPECT_THROW(parseRatingsCsv(""), DataError);
  EXPECT_THROW(parseRatingsCsv("a,b,c,d,e,f\n\n"), DataError);
  EXPECT_THROW(readRatingsCsv("/nonexistent/ratings.csv"), DataError);
}

TEST(Ratings, ReadsFromDisk) {
  testing::TempDir dir("ratings");
  const auto path = dir.path() / "r.csv";
  std::ofstream(path) << "0,text2motion,3,1.5,2.5,kicks\n";
  const auto r = readRatingsCsv(path);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].modelName, "text2motion");
}

TEST(Ratings, MotionFileName) {
  EXPECT_EQ(motionFileName("MotionDiffuse", 42), "AMASS_motion_MotionDiffuse_42.npy");
}

} // namespace
} // namespace motioneval
