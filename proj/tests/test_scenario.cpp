#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "drk/errors.hpp"
#include "drk/scenario.hpp"
#include "support/configs.hpp"

using namespace drk;
using nlohmann::json;

namespace {

json valid_doc() {
    return json{
        {"schema_version", 1},
        {"name", "fixture"},
        {"populations", {{"N_1", 6}, {"N_2", 6}, {"N_3", 6}}},
        {"channels", {{"M_1", 3}, {"M_2", 3}, {"K", 2}}},
        {"access", {{"L_1", 6}, {"L_2", 6}, {"L_3", 6}}},
        {"traffic", {{"p_1", 0.4}, {"p_2", 0.4}, {"p_3", 0.4}}},
        {"service", {{"q", 0.25}, {"H", 250000}}},
        {"links",
         {{"1_1", {{"w_up", 0.8}, {"w_down", 0.8}}},
          {"3_1", {{"w_up", 0.8}, {"w_down", 0.8}}},
          {"3_2", {{"w_up", 0.8}, {"w_down", 0.8}}},
          {"2_2", {{"w_up", 0.8}, {"w_down", 0.8}}}}}};
}

} // namespace

TEST_CASE("well-formed document loads") {
    const auto cfg = scenario::load_scenario(valid_doc());
    CHECK(cfg.name == "fixture");
    CHECK(cfg.n_1 == 6);
    CHECK(cfg.m_2 == 3);
    CHECK(cfg.k == 2);
    CHECK(cfg.l_3 == 6);
    CHECK(cfg.p_2 == 0.4);
    CHECK(cfg.q == 0.25);
    CHECK(cfg.h == 250000.0);
    CHECK(cfg.w_3_2.w_down == 0.8);
}

TEST_CASE("serialization round-trips to an equal config") {
    for (const auto& cfg : test::corpus()) {
        CAPTURE(cfg.name);
        const auto back = scenario::load_scenario(scenario::to_json(cfg));
        CHECK(back == cfg);
    }
}

TEST_CASE("file save and load round-trip") {
    const auto cfg = test::asymmetric_links(0.4, 2);
    const std::string path = "scenario_roundtrip_tmp.json";
    scenario::save_scenario_file(cfg, path);
    const auto back = scenario::load_scenario_file(path);
    std::remove(path.c_str());
    CHECK(back == cfg);
}

TEST_CASE("shipped scenario files load and are normalized") {
    const std::string root = DRK_SOURCE_DIR;
    const auto two = scenario::load_scenario_file(
        root + "/scenarios/two_cell_reference.json");
    CHECK(two.n_1 == 6);
    CHECK(two.k == 3);
    CHECK(two.q == 0.25);
    CHECK(two.w_3_1.w_up == doctest::Approx(0.806).epsilon(1e-12));

    const auto macro = scenario::load_scenario_file(
        root + "/scenarios/macrocell_reference.json");
    CHECK(macro.n_3 == 40);
    CHECK(macro.m_1 == 10);
    CHECK(macro.q == doctest::Approx(0.41).epsilon(1e-12));
    // its links are written as radio parameters; loading resolves them
    CHECK(macro.w_1_1.w_up ==
          doctest::Approx(0.9998486417833279).epsilon(1e-12));
    CHECK(macro.w_1_1.w_down == macro.w_1_1.w_up);
}

TEST_CASE("radio-form links resolve through the outage model") {
    auto doc = valid_doc();
    doc["links"]["3_1"] = json{
        {"radio",
         {{"gamma_q_u", -85.0}, {"gamma_q_d", -90.0},
          {"P_t_u", 30.0}, {"P_t_d", 30.0},
          {"W_u", -31.54}, {"W_d", -31.54},
          {"sigma_psi", 3.65}, {"delta", 3.0},
          {"d_0_u", 1.0}, {"d_0_d", 1.0}, {"d", 220.0}}}};
    const auto cfg = scenario::load_scenario(doc);
    CHECK(cfg.w_3_1.w_up ==
          doctest::Approx(0.9998486417833279).epsilon(1e-12));
    CHECK(cfg.w_3_1.w_down > cfg.w_3_1.w_up); // looser threshold downlink
    CHECK(cfg.w_1_1.w_up == 0.8);             // other links untouched
}

TEST_CASE("direct q wins over transfer parameters") {
    auto doc = valid_doc();
    doc["service"] = json{
        {"q", 0.5}, {"r_p", 8000}, {"H", 250000}, {"t_s", 0.001}};
    const auto cfg = scenario::load_scenario(doc); // warns on stderr
    CHECK(cfg.q == 0.5);
    CHECK(cfg.h == 250000.0);
}

TEST_CASE("q derived from the transfer triple") {
    auto doc = valid_doc();
    doc["service"] = json{{"r_p", 8000}, {"H", 250000}, {"t_s", 0.001}};
    const auto cfg = scenario::load_scenario(doc);
    CHECK(cfg.q == doctest::Approx(0.03125).epsilon(1e-15));
}

TEST_CASE("derive_q") {
    CHECK(scenario::derive_q(8000.0, 250000.0, 0.001) ==
          doctest::Approx(0.03125).epsilon(1e-15));
    CHECK(scenario::derive_q(8000.0, 250000.0, 0.008) ==
          doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(scenario::derive_q(0.0, 250000.0, 0.001), ValidationError);
    CHECK_THROWS_AS(scenario::derive_q(8000.0, -1.0, 0.001), ValidationError);
    CHECK_THROWS_AS(scenario::derive_q(8000.0, 250000.0, 0.0), ValidationError);
    // a transfer shorter than one frame would need q > 1
    CHECK_THROWS_AS(scenario::derive_q(100.0, 250000.0, 0.001), ValidationError);
}

TEST_CASE("parse errors carry the field path") {
    auto missing = valid_doc();
    missing.erase("populations");
    try {
        scenario::load_scenario(missing);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("populations") != std::string::npos);
    }

    auto bad_type = valid_doc();
    bad_type["channels"]["M_1"] = "three";
    try {
        scenario::load_scenario(bad_type);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("M_1") != std::string::npos);
    }

    auto no_service = valid_doc();
    no_service["service"] = json::object();
    CHECK_THROWS_AS(scenario::load_scenario(no_service), ParseError);

    auto bad_version = valid_doc();
    bad_version["schema_version"] = 7;
    CHECK_THROWS_AS(scenario::load_scenario(bad_version), ParseError);

    CHECK_THROWS_AS(scenario::load_scenario(json::array()), ParseError);
    CHECK_THROWS_AS(scenario::load_scenario_text("{ not json"), ParseError);
    CHECK_THROWS_AS(scenario::load_scenario_file("no_such_file.json"),
                    ParseError);
}

TEST_CASE("constraint violations are rejected with a named field") {
    auto k_too_big = valid_doc();
    k_too_big["channels"]["K"] = 4; // M_2 is 3
    CHECK_THROWS_AS(scenario::load_scenario(k_too_big), ValidationError);

    auto negative_pop = valid_doc();
    negative_pop["populations"]["N_2"] = -1;
    CHECK_THROWS_AS(scenario::load_scenario(negative_pop), ValidationError);

    auto zero_channels = valid_doc();
    zero_channels["channels"]["M_1"] = 0;
    CHECK_THROWS_AS(scenario::load_scenario(zero_channels), ValidationError);

    auto p_out_of_range = valid_doc();
    p_out_of_range["traffic"]["p_3"] = 1.5;
    CHECK_THROWS_AS(scenario::load_scenario(p_out_of_range), ValidationError);

    auto zero_slots = valid_doc();
    zero_slots["access"]["L_2"] = 0;
    CHECK_THROWS_AS(scenario::load_scenario(zero_slots), ValidationError);

    auto q_zero = valid_doc();
    q_zero["service"] = json{{"q", 0.0}};
    CHECK_THROWS_AS(scenario::load_scenario(q_zero), ValidationError);

    auto w_bad = valid_doc();
    w_bad["links"]["2_2"]["w_down"] = 1.2;
    CHECK_THROWS_AS(scenario::load_scenario(w_bad), ValidationError);

    // validate() is also callable directly on a constructed config
    auto cfg = test::two_cell(0.4, 3);
    cfg.k = 5;
    CHECK_THROWS_AS(scenario::validate(cfg), ValidationError);
}

TEST_CASE("kinetics mapping of the four group-BS pairs") {
    const auto cfg = test::asymmetric_links(0.4, 2);
    const auto sk = scenario::kinetics_for(cfg);

    CHECK(sk.g11.group == 1);
    CHECK(sk.g11.bs == 1);
    CHECK(sk.g11.population == cfg.n_1);
    CHECK(sk.g11.slots == cfg.l_1);
    CHECK(sk.g11.p == cfg.p_1);
    CHECK(sk.g11.w_up == cfg.w_1_1.w_up);
    CHECK(sk.g11.w_down == cfg.w_1_1.w_down);
    CHECK(sk.g11.q == cfg.q);

    CHECK(sk.g22.group == 2);
    CHECK(sk.g22.bs == 2);
    CHECK(sk.g22.population == cfg.n_2);
    CHECK(sk.g22.w_down == cfg.w_2_2.w_down);

    // the transferable group requests through its cell-1 link but its
    // offloaded connections live or die on the cell-2 downlink
    CHECK(sk.g31.group == 3);
    CHECK(sk.g31.bs == 1);
    CHECK(sk.g31.population == cfg.n_3);
    CHECK(sk.g31.slots == cfg.l_3);
    CHECK(sk.g31.p == cfg.p_3);
    CHECK(sk.g31.w_up == cfg.w_3_1.w_up);
    CHECK(sk.g31.w_down == cfg.w_3_1.w_down);

    CHECK(sk.g32.group == 3);
    CHECK(sk.g32.bs == 2);
    CHECK(sk.g32.w_up == cfg.w_3_2.w_up);
    CHECK(sk.g32.w_down == cfg.w_3_2.w_down);
}

TEST_CASE("corpus configs are all valid") {
    const auto cs = test::corpus();
    CHECK(cs.size() >= 12);
    for (const auto& cfg : cs) {
        CAPTURE(cfg.name);
        CHECK_NOTHROW(scenario::validate(cfg));
    }
}
