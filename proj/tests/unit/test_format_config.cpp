#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "softnash/config.hpp"
#include "softnash/format.hpp"

using namespace softnash;
using nlohmann::json;

namespace {

json default_document() {
  std::ifstream in(default_config_path());
  return json::parse(in);
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5,
                   0.013671055426473537}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Format, StrictParse) {
  EXPECT_EQ(parse_double("1e-3"), 1e-3);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
  EXPECT_THROW(parse_double(" 1"), std::invalid_argument);
  EXPECT_THROW(parse_double("NA"), std::invalid_argument);
}

TEST(Format, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Config, DefaultDocumentLoads) {
  const auto cfg = load_config(default_config_path());
  EXPECT_EQ(cfg.modes, standard_modes());
  EXPECT_EQ(cfg.seeds.size(), 12u);
  EXPECT_EQ(cfg.trial.dynamics.period, 0.01);
  EXPECT_EQ(cfg.trial.dynamics.A(3, 3), 1.0 - 4.0 * 0.01 / 0.2);
  EXPECT_EQ(cfg.trial.weights.Q_r, 400.0 * MatrixXd::Identity(3, 3));
  EXPECT_EQ(cfg.trial.workspace.max, Vec3(0.1, 0.1, 0.1));
  EXPECT_EQ(cfg.trial.human.deviations.size(), 2u);
  EXPECT_EQ(cfg.session.coupling_kp, 60.0);
  EXPECT_EQ(cfg.session.coupling_kd, 4.0);
  EXPECT_EQ(cfg.session.decimation, 2);
  EXPECT_EQ(cfg.trial.config_hash.size(), 16u);
}

TEST(Config, EverySectionCarriesProvenance) {
  const auto doc = default_document();
  EXPECT_TRUE(doc.contains("_provenance"));
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) EXPECT_TRUE(value.contains("_provenance")) << key;
  }
}

TEST(Config, HashIgnoresCommentsButNotValues) {
  auto doc = default_document();
  const auto base = parse_config(doc.dump()).trial.config_hash;
  doc["plant"]["_provenance"] = "edited comment";
  EXPECT_EQ(parse_config(doc.dump()).trial.config_hash, base);
  doc["plant"]["mass_kg"] = 0.25;
  EXPECT_NE(parse_config(doc.dump()).trial.config_hash, base);
}

TEST(Config, MissingKeyNamesPath) {
  auto doc = default_document();
  doc["human"].erase("delay_steps");
  try {
    parse_config(doc.dump());
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("$.human.delay_steps"), std::string::npos) << e.what();
  }
}

TEST(Config, MatrixForms) {
  auto doc = default_document();
  doc["weights"]["Q_r"] = json::array({json::array({100, 0, 0}), json::array({0, 200, 0}),
                                       json::array({0, 0, 300})});
  const auto cfg = parse_config(doc.dump());
  EXPECT_EQ(cfg.trial.weights.Q_r(1, 1), 200.0);
  doc["weights"]["Q_r"] = json::array({1, 2});
  EXPECT_THROW(parse_config(doc.dump()), std::invalid_argument);
}

TEST(Config, RejectsBadValues) {
  auto bad = [](auto edit) {
    auto doc = default_document();
    edit(doc);
    return doc.dump();
  };
  EXPECT_THROW(parse_config("{"), std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["experiment"]["modes"] = json::array(); })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["experiment"]["seeds"] = json::array(); })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["experiment"]["modes"] = {"PD"}; })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["experiment"]["modes"] = {3}; })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["plant"]["damping_Ns_per_m"] = 20.0; })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["plant"]["mass_kg"] = "heavy"; })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["weights"]["R_r"] = 0.0; })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["trial"]["fade_s"] = 40.0; })),
               std::invalid_argument);
  EXPECT_THROW(parse_config(bad([](json& d) { d["human"]["delay_steps"] = 1.5; })),
               std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/softnash.json"), std::invalid_argument);
}
