#include "ctcbert/config.hpp"

#include "ctcbert/error.hpp"

#include <gtest/gtest.h>

namespace ctcbert {
namespace {

ErrorKind parse_error(std::string_view text, std::string* message = nullptr) {
  try {
    parse_config(text, "test.cfg");
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::Io;
}

TEST(ConfigTest, DefaultsMatchComponents) {
  const ExperimentConfig c = parse_config("");
  EXPECT_EQ(c.corpus.utterances, 200);
  EXPECT_EQ(c.corpus.frames, 100);
  EXPECT_EQ(c.train.steps, 2000);
  EXPECT_EQ(c.train.mask_prob, 0.08);
  EXPECT_EQ(c.train.mask_span, 10);
  EXPECT_EQ(c.train.weight_decay, 0.01);
  EXPECT_EQ(c.train.beta2, 0.98);
  EXPECT_EQ(c.model.vocab, 20);
}

TEST(ConfigTest, ParsesValuesAndComments) {
  const ExperimentConfig c = parse_config(
      "# experiment\n"
      "vocab = 7   # fewer classes\n"
      "\n"
      "alpha=0.3\n"
      "nonlinearity = relu\n"
      "attention = false\n"
      "seed = 42\n");
  EXPECT_EQ(c.corpus.vocab, 7);
  EXPECT_EQ(c.model.vocab, 7);
  EXPECT_EQ(c.train.mode.alpha, 0.3);
  EXPECT_EQ(c.model.nonlinearity, Nonlinearity::Relu);
  EXPECT_FALSE(c.model.attention);
  EXPECT_EQ(c.corpus.seed, 42u);
  EXPECT_EQ(c.train.seed, 42u);
  EXPECT_EQ(c.finetune.seed, 42u);
}

TEST(ConfigTest, UnknownKeyNamesLine) {
  std::string message;
  EXPECT_EQ(parse_error("vocab = 5\nlearning_rate = 0.1\n", &message), ErrorKind::ConfigInvalid);
  EXPECT_NE(message.find("test.cfg:2"), std::string::npos) << message;
  EXPECT_NE(message.find("learning_rate"), std::string::npos) << message;
}

TEST(ConfigTest, RejectsMalformedInput) {
  EXPECT_EQ(parse_error("vocab 5\n"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(parse_error("vocab = five\n"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(parse_error("vocab = 5\nvocab = 6\n"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(parse_error("attention = maybe\n"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(parse_error("steps = 10x\n"), ErrorKind::ConfigInvalid);
}

TEST(ConfigTest, ValidateCatchesRangeErrors) {
  ExperimentConfig c = parse_config("alpha = 1.5\n");
  EXPECT_THROW(c.validate(), Error);
  c = parse_config("mask_p = -0.1\n");
  EXPECT_THROW(c.validate(), Error);
  c = parse_config("layers = 9\n");
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(parse_config("").validate());
}

TEST(ConfigTest, TextRoundTrip) {
  ExperimentConfig c = parse_config("vocab = 9\nlr = 0.0125\nfreeze_encoder = true\n");
  const ExperimentConfig back = parse_config(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  for (const std::string& key : ExperimentConfig::keys()) EXPECT_EQ(back.get(key), c.get(key));
}

TEST(ConfigTest, LaterSetWins) {
  ExperimentConfig c = parse_config("alpha = 0.2\n");
  c.set("alpha", "0.9");
  EXPECT_EQ(c.train.mode.alpha, 0.9);
  EXPECT_THROW(c.set("nope", "1"), Error);
}

}  // namespace
}  // namespace ctcbert
