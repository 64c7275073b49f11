#include "drk/scenario.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "drk/errors.hpp"

namespace drk::scenario {

namespace {

[[noreturn]] void fail_parse(const std::string& path, const std::string& what) {
    throw ParseError("scenario: " + path + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail_parse(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail_parse(path + "." + key, "missing");
    return *it;
}

int get_int(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_number_integer())
        fail_parse(path + "." + key, "expected an integer");
    return v.get<int>();
}

double get_num(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_number())
        fail_parse(path + "." + key, "expected a number");
    return v.get<double>();
}

radio::RadioParams parse_radio(const json& j, const std::string& path) {
    radio::RadioParams rp;
    rp.gamma_q_up = get_num(j, "gamma_q_u", path);
    rp.gamma_q_down = get_num(j, "gamma_q_d", path);
    rp.p_t_up = get_num(j, "P_t_u", path);
    rp.p_t_down = get_num(j, "P_t_d", path);
    rp.w_up_db = get_num(j, "W_u", path);
    rp.w_down_db = get_num(j, "W_d", path);
    rp.sigma_psi = get_num(j, "sigma_psi", path);
    rp.delta = get_num(j, "delta", path);
    rp.d_0_up = get_num(j, "d_0_u", path);
    rp.d_0_down = get_num(j, "d_0_d", path);
    rp.distance = get_num(j, "d", path);
    return rp;
}

radio::LinkQuality parse_link(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    std::string sub = path + "." + key;
    if (v.contains("radio")) {
        try {
            return radio::link_quality(parse_radio(v.at("radio"), sub + ".radio"));
        } catch (const DomainError& e) {
            throw ValidationError(sub + ".radio: " + e.what());
        }
    }
    radio::LinkQuality lq;
    lq.w_up = get_num(v, "w_up", sub);
    lq.w_down = get_num(v, "w_down", sub);
    return lq;
}

void check_prob(double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("scenario: " + what + " must lie in [0, 1], got " +
                              std::to_string(v));
}

} // namespace

ScenarioKinetics kinetics_for(const ScenarioConfig& cfg) {
    ScenarioKinetics sk;
    sk.g11 = {1, 1, cfg.n_1, cfg.l_1, cfg.p_1, cfg.w_1_1.w_up, cfg.w_1_1.w_down, cfg.q};
    sk.g22 = {2, 2, cfg.n_2, cfg.l_2, cfg.p_2, cfg.w_2_2.w_up, cfg.w_2_2.w_down, cfg.q};
    sk.g31 = {3, 1, cfg.n_3, cfg.l_3, cfg.p_3, cfg.w_3_1.w_up, cfg.w_3_1.w_down, cfg.q};
    sk.g32 = {3, 2, cfg.n_3, cfg.l_3, cfg.p_3, cfg.w_3_2.w_up, cfg.w_3_2.w_down, cfg.q};
    return sk;
}

double derive_q(double r_p_bits, double h_bits_per_s, double t_s_seconds) {
    if (r_p_bits <= 0.0 || h_bits_per_s <= 0.0 || t_s_seconds <= 0.0)
        throw ValidationError("scenario: r_p, H and t_s must all be positive");
    double per_frame = h_bits_per_s * t_s_seconds;
    if (r_p_bits < per_frame)
        throw ValidationError("scenario: transfer size r_p smaller than one frame "
                              "of throughput (H * t_s); q would exceed 1");
    return per_frame / r_p_bits;
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.n_1 < 0 || cfg.n_2 < 0 || cfg.n_3 < 0)
        throw ValidationError("scenario: populations must be non-negative");
    if (cfg.m_1 < 1 || cfg.m_2 < 1)
        throw ValidationError("scenario: each cell needs at least one channel");
    if (cfg.k < 0)
        throw ValidationError("scenario: K must be non-negative");
    if (cfg.k > cfg.m_2)
        throw ValidationError("scenario: K exceeds M_2 (" + std::to_string(cfg.k) +
                              " > " + std::to_string(cfg.m_2) + ")");
    if (cfg.l_1 < 1 || cfg.l_2 < 1 || cfg.l_3 < 1)
        throw ValidationError("scenario: each group needs at least one access slot");
    check_prob(cfg.p_1, "p_1");
    check_prob(cfg.p_2, "p_2");
    check_prob(cfg.p_3, "p_3");
    if (!(cfg.q > 0.0 && cfg.q <= 1.0))
        throw ValidationError("scenario: q must lie in (0, 1], got " +
                              std::to_string(cfg.q));
    if (cfg.h < 0.0)
        throw ValidationError("scenario: H must be non-negative");
    check_prob(cfg.w_1_1.w_up, "links.1_1.w_up");
    check_prob(cfg.w_1_1.w_down, "links.1_1.w_down");
    check_prob(cfg.w_3_1.w_up, "links.3_1.w_up");
    check_prob(cfg.w_3_1.w_down, "links.3_1.w_down");
    check_prob(cfg.w_3_2.w_up, "links.3_2.w_up");
    check_prob(cfg.w_3_2.w_down, "links.3_2.w_down");
    check_prob(cfg.w_2_2.w_up, "links.2_2.w_up");
    check_prob(cfg.w_2_2.w_down, "links.2_2.w_down");
}

ScenarioConfig load_scenario(const json& doc) {
    if (!doc.is_object()) fail_parse("$", "expected a JSON object");
    int version = get_int(doc, "schema_version", "$");
    if (version != 1)
        fail_parse("$.schema_version", "unsupported version " + std::to_string(version));

    ScenarioConfig cfg;
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) fail_parse("$.name", "expected a string");
        cfg.name = doc.at("name").get<std::string>();
    }

    const json& pop = field(doc, "populations", "$");
    cfg.n_1 = get_int(pop, "N_1", "$.populations");
    cfg.n_2 = get_int(pop, "N_2", "$.populations");
    cfg.n_3 = get_int(pop, "N_3", "$.populations");

    const json& ch = field(doc, "channels", "$");
    cfg.m_1 = get_int(ch, "M_1", "$.channels");
    cfg.m_2 = get_int(ch, "M_2", "$.channels");
    cfg.k = get_int(ch, "K", "$.channels");

    const json& acc = field(doc, "access", "$");
    cfg.l_1 = get_int(acc, "L_1", "$.access");
    cfg.l_2 = get_int(acc, "L_2", "$.access");
    cfg.l_3 = get_int(acc, "L_3", "$.access");

    const json& tr = field(doc, "traffic", "$");
    cfg.p_1 = get_num(tr, "p_1", "$.traffic");
    cfg.p_2 = get_num(tr, "p_2", "$.traffic");
    cfg.p_3 = get_num(tr, "p_3", "$.traffic");

    const json& svc = field(doc, "service", "$");
    bool has_direct = svc.contains("q");
    bool has_derived = svc.contains("r_p") || svc.contains("H") || svc.contains("t_s");
    if (!has_direct && !has_derived)
        fail_parse("$.service", "needs either q or the triple r_p, H, t_s");
    if (has_derived && !has_direct) {
        cfg.q = derive_q(get_num(svc, "r_p", "$.service"),
                         get_num(svc, "H", "$.service"),
                         get_num(svc, "t_s", "$.service"));
    } else {
        cfg.q = get_num(svc, "q", "$.service");
        if (svc.contains("r_p") || svc.contains("t_s"))
            std::cerr << "warning: scenario " << (cfg.name.empty() ? "(unnamed)" : cfg.name)
                      << ": both q and transfer-size parameters given; using q = "
                      << cfg.q << "\n";
    }
    if (svc.contains("H")) cfg.h = get_num(svc, "H", "$.service");

    const json& links = field(doc, "links", "$");
    cfg.w_1_1 = parse_link(links, "1_1", "$.links");
    cfg.w_3_1 = parse_link(links, "3_1", "$.links");
    cfg.w_3_2 = parse_link(links, "3_2", "$.links");
    cfg.w_2_2 = parse_link(links, "2_2", "$.links");

    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: invalid JSON: ") + e.what());
    }
    return load_scenario(doc);
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str());
}

json to_json(const ScenarioConfig& cfg) {
    auto link = [](const radio::LinkQuality& lq) {
        return json{{"w_up", lq.w_up}, {"w_down", lq.w_down}};
    };
    json doc{
        {"schema_version", 1},
        {"populations", {{"N_1", cfg.n_1}, {"N_2", cfg.n_2}, {"N_3", cfg.n_3}}},
        {"channels", {{"M_1", cfg.m_1}, {"M_2", cfg.m_2}, {"K", cfg.k}}},
        {"access", {{"L_1", cfg.l_1}, {"L_2", cfg.l_2}, {"L_3", cfg.l_3}}},
        {"traffic", {{"p_1", cfg.p_1}, {"p_2", cfg.p_2}, {"p_3", cfg.p_3}}},
        {"service", cfg.h > 0.0 ? json{{"q", cfg.q}, {"H", cfg.h}}
                                : json{{"q", cfg.q}}},
        {"links",
         {{"1_1", link(cfg.w_1_1)},
          {"3_1", link(cfg.w_3_1)},
          {"3_2", link(cfg.w_3_2)},
          {"2_2", link(cfg.w_2_2)}}},
    };
    if (!cfg.name.empty()) doc["name"] = cfg.name;
    return doc;
}

void save_scenario_file(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("scenario: cannot write " + path);
    out << to_json(cfg).dump(2) << "\n";
}

} // namespace drk::scenario
