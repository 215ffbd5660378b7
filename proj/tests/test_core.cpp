#include "helpers.hpp"

#include "ssboost/core.hpp"
#include "ssboost/serialization.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ssb;

namespace {

bool mentions(const std::vector<std::string>& report, const std::string& text) {
  return std::any_of(report.begin(), report.end(), [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("validate_dataset accepts a well-formed session") {
  const auto d = testing::noise_dataset(1, 120, 1024, 12);
  CHECK(validate_dataset(d).empty());
}

TEST_CASE("validate_dataset reports channel count mismatch") {
  auto d = testing::noise_dataset(2, 4, 64, 3);
  d.trials[1] = make_trial(testing::white_noise(9, 64, 2), kLeft);
  CHECK(mentions(validate_dataset(d), "channel count mismatch"));
}

TEST_CASE("validate_dataset reports a single-class dataset") {
  auto d = testing::noise_dataset(3, 6, 64, 2);
  for (auto& t : d.trials) t.label = kRight;
  CHECK(mentions(validate_dataset(d), "single-class dataset"));
  CHECK(validate_dataset(d, false).empty());
}

TEST_CASE("validate_dataset does not mutate its input") {
  auto d = testing::noise_dataset(4, 4, 32, 2);
  d.channel_names = {"C3", "C3"};
  d.trials[0].label = 7;
  const auto before = d;
  const auto report = validate_dataset(d);
  CHECK(mentions(report, "duplicate channel names"));
  CHECK(mentions(report, "invalid label"));
  CHECK(d.channel_names == before.channel_names);
  CHECK(d.trials[0].label == 7);
  CHECK(d.trials[1].samples == before.trials[1].samples);
}

TEST_CASE("make_trial rejects invalid shapes, labels and values") {
  CHECK_THROWS_AS(make_trial(Eigen::MatrixXd::Zero(1, 3), kLeft), Error);
  CHECK_THROWS_AS(make_trial(Eigen::MatrixXd::Zero(4, 0), kLeft), Error);
  CHECK_THROWS_AS(make_trial(Eigen::MatrixXd::Zero(4, 2), 0), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(make_trial(bad, kLeft), doctest::Contains("non-finite"), Error);
}

TEST_CASE("ChannelSet enforces the minimum popcount") {
  CHECK_THROWS_AS(ChannelSet::from_indices(12, {0, 1, 2}), Error);
  CHECK(ChannelSet::from_indices(12, {0, 1, 2, 3}).count() == 4);
  CHECK(ChannelSet::from_indices(12, {0, 8}, 1).count() == 2);
  CHECK(ChannelSet::full(12).is_full());
}

TEST_CASE("ChannelSet text form round-trips and orders by binary value") {
  const auto s = ChannelSet::from_indices(6, {0, 2, 5}, 1);
  CHECK(s.to_string() == "101001");
  CHECK(ChannelSet::parse("101001") == s);
  CHECK_THROWS_AS(ChannelSet::parse("10x1"), Error);
  // Channel 0 is the least significant bit.
  CHECK(ChannelSet::parse("100000") < ChannelSet::parse("010000"));
  CHECK(ChannelSet::parse("110000") < ChannelSet::parse("001000"));
}

TEST_CASE("Band validity follows the Length constraint") {
  CHECK(is_valid_band(Band{5, 40}));
  CHECK(is_valid_band(Band{5, 10}));
  CHECK_FALSE(is_valid_band(Band{5, 9}));
  CHECK_FALSE(is_valid_band(Band{4, 20}));
  CHECK_FALSE(is_valid_band(Band{30, 41}));
  CHECK_FALSE(is_valid_band(Band{20, 20}));
  CHECK_THROWS_AS(require_valid_band(Band{10, 12}), Error);
}

TEST_CASE("Precondition mode invariants") {
  const auto full = ChannelSet::full(12);
  const auto part = ChannelSet::from_indices(12, {0, 1, 2, 3});
  CHECK(validate_precondition(Precondition{full, kGlobalBand, Mode::Plain}).empty());
  CHECK_FALSE(validate_precondition(Precondition{part, kGlobalBand, Mode::Plain}).empty());
  CHECK(validate_precondition(Precondition{part, kGlobalBand, Mode::SB}).empty());
  CHECK_FALSE(validate_precondition(Precondition{part, Band{10, 20}, Mode::SB}).empty());
  CHECK(validate_precondition(Precondition{full, Band{10, 20}, Mode::FB}).empty());
  CHECK_FALSE(validate_precondition(Precondition{part, Band{10, 20}, Mode::FB}).empty());
  CHECK(validate_precondition(Precondition{part, Band{10, 20}, Mode::SFB}).empty());
  CHECK(Precondition{full, kGlobalBand, Mode::Plain}.key() == "111111111111@5-40");
}

TEST_CASE("Mode names parse and print") {
  for (Mode m : {Mode::Plain, Mode::SB, Mode::FB, Mode::SFB}) CHECK(parse_mode(to_string(m)) == m);
  CHECK(parse_mode("SFB") == Mode::SFB);
  CHECK_THROWS_AS(parse_mode("both"), Error);
}

TEST_CASE("BoostConfig defaults and validation") {
  BoostConfig c;
  CHECK(c.k_max == 60);
  CHECK(c.subset_fraction == 0.7);
  CHECK(c.epsilon == 0.01);
  CHECK(c.pool_cap_multiple == 20);
  CHECK(c.candidate_sample_size == 256);
  CHECK(c.csp_dim == 4);
  CHECK(c.svm_cost == 1.0);
  CHECK(c.validation_fraction == 0.1);
  CHECK_NOTHROW(c.validate());

  auto bad = c;
  bad.csp_dim = 3;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.csp_dim = 10;
  CHECK_THROWS_WITH_AS(bad.validate(), "csp_dim must not exceed 2 * min_channels", Error);
  bad = c;
  bad.subset_fraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("core types survive a JSON round-trip") {
  const Band b{12, 27};
  CHECK(Json(b).get<Band>() == b);
  const auto s = ChannelSet::from_indices(12, {1, 4, 7, 11});
  CHECK(Json(s).get<ChannelSet>() == s);
  const Precondition p{s, b, Mode::SFB};
  const auto p2 = Json(p).get<Precondition>();
  CHECK(p2 == p);
  CHECK(p2.mode == Mode::SFB);

  BoostConfig c;
  c.k_max = 17;
  c.subset_fraction = 0.55;
  c.epsilon = 0.02;
  c.pool_cap_multiple = 7;
  c.candidate_sample_size = 33;
  c.csp_dim = 2;
  c.svm_cost = 0.3;
  c.validation_fraction = 0.2;
  c.rng_seed = 0xfeedfacecafebeefULL;
  c.min_channels = 3;
  const auto c2 = Json::parse(Json(c).dump()).get<BoostConfig>();
  CHECK(Json(c2) == Json(c));
  CHECK(c2.rng_seed == c.rng_seed);
}
