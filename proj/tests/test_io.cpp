#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "test_support.hpp"

using namespace rankcut;
using namespace rankcut::testing;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

const char* kModel = R"({
  "nodes": [
    {"name": "L", "role": "latent"},
    {"name": "X1"},
    {"name": "X2", "role": "observed"}
  ],
  "edges": [
    {"from": "L", "to": "X1", "weight": 1.5},
    {"from": "L", "to": "X2", "weight": -0.5}
  ],
  "phi": {"X1": 0.25},
  "selections": [
    {"targets": ["X1", "X2"], "coeffs": [1, 2],
     "noise": {"kind": "gaussian", "param": 2},
     "admissible": [["interval", null, -1], ["closed", 1, "inf"], ["point", 0]]}
  ],
  "clustering": [{"latent": "L", "measurements": ["X1", "X2"]}]
})";

}  // namespace

TEST(GraphJson, RoundTrip) {
    auto g = confounded_colliders();
    auto back = parse_graph(graph_to_json(g).dump(2));
    EXPECT_EQ(back, g);
}

TEST(GraphJson, DuplicateNameIsLineAnchored) {
    const std::string text = "{\n  \"nodes\": [\n    {\"name\": \"A\"},\n    {\"name\": \"A\"}\n  ]\n}\n";
    auto msg = error_of([&] { parse_graph(text, "g.json"); });
    EXPECT_NE(msg.find("g.json:4:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("duplicate node name 'A'"), std::string::npos) << msg;
}

TEST(GraphJson, CycleIsLineAnchored) {
    const std::string text = R"({
  "nodes": [{"name": "A"}, {"name": "B"}, {"name": "C"}],
  "edges": [
    {"from": "C", "to": "A"},
    {"from": "A", "to": "B"},
    {"from": "B", "to": "A"}
  ]
})";
    auto msg = error_of([&] { parse_graph(text, "g.json"); });
    EXPECT_NE(msg.find("g.json:5:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("cycle"), std::string::npos) << msg;
}

TEST(GraphJson, SyntaxAndFieldErrors) {
    auto msg = error_of([] { parse_graph("{\n\"nodes\": [\n{\"name\": \"A\",}\n]}", "bad.json"); });
    EXPECT_NE(msg.find("bad.json:3:"), std::string::npos) << msg;
    msg = error_of([] { parse_graph("{\"nodes\": [{\"name\": \"A\", \"role\": \"ghost\"}]}", "r.json"); });
    EXPECT_NE(msg.find("role"), std::string::npos) << msg;
    msg = error_of([] { parse_graph("{\"nodes\": [{\"name\": \"A\"}], \"edges\": [{\"from\": \"A\", \"to\": \"Z\"}]}"); });
    EXPECT_NE(msg.find("unknown node 'Z'"), std::string::npos) << msg;
    EXPECT_THROW(parse_graph("[]"), InputError);
}

TEST(ModelJson, ParsesEveryField) {
    auto m = parse_model(kModel, "m.json");
    EXPECT_EQ(m.sem.size(), 3u);
    EXPECT_DOUBLE_EQ(m.sem.phi()(1), 0.25);
    EXPECT_DOUBLE_EQ(m.sem.phi()(2), 1.0);
    ASSERT_EQ(m.selection.size(), 1u);
    const auto& c = m.selection.conditions[0];
    EXPECT_EQ(c.noise.kind, NoiseKind::Gaussian);
    ASSERT_EQ(c.admissible.intervals().size(), 2u);
    EXPECT_EQ(c.admissible.intervals()[0].lo, -std::numeric_limits<double>::infinity());
    EXPECT_TRUE(c.admissible.intervals()[1].lo_closed);
    EXPECT_EQ(c.admissible.points(), std::vector<double>{0.0});
    ASSERT_TRUE(m.clustering.has_value());
    EXPECT_EQ(m.clustering->latents(), std::vector<std::string>{"L"});
}

TEST(ModelJson, RoundTripIsStable) {
    auto m = parse_model(kModel);
    const auto once = model_to_json(m).dump(2);
    const auto twice = model_to_json(parse_model(once)).dump(2);
    EXPECT_EQ(once, twice);
}

TEST(ModelJson, SelectionErrors) {
    std::string bad = kModel;
    bad.replace(bad.find("\"coeffs\": [1, 2]"), 16, "\"coeffs\": [1]");
    auto msg = error_of([&] { parse_model(bad, "m.json"); });
    EXPECT_NE(msg.find("m.json:13:"), std::string::npos) << msg;
    std::string noise = kModel;
    noise.replace(noise.find("\"gaussian\""), 10, "\"cauchy\"");
    msg = error_of([&] { parse_model(noise, "m.json"); });
    EXPECT_NE(msg.find("m.json:14: unknown noise kind"), std::string::npos) << msg;
    std::string adm = kModel;
    adm.replace(adm.find("[\"point\", 0]"), 12, "[\"segment\", 0, 1]");
    msg = error_of([&] { parse_model(adm, "m.json"); });
    EXPECT_NE(msg.find("m.json:15:"), std::string::npos) << msg;
}

TEST(Csv, RoundTripIsExact) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    Dataset d{{"a", "b", "c"}, Eigen::MatrixXd(20, 3)};
    for (Eigen::Index i = 0; i < d.values.size(); ++i) d.values.data()[i] = z(rng) * std::pow(10.0, static_cast<double>(i % 9) - 4);
    d.values(0, 0) = 0.1;
    d.values(1, 1) = -1e-300;
    auto back = parse_csv(dataset_to_csv(d));
    EXPECT_EQ(back.labels, d.labels);
    EXPECT_TRUE(back.values == d.values);
}

TEST(Csv, Errors) {
    auto msg = error_of([] { parse_csv("a,b\n1,2\n3\n", "d.csv"); });
    EXPECT_NE(msg.find("d.csv:3:"), std::string::npos) << msg;
    msg = error_of([] { parse_csv("a,b\n1,x\n", "d.csv"); });
    EXPECT_NE(msg.find("d.csv:2:"), std::string::npos) << msg;
    EXPECT_THROW(parse_csv("a,a\n1,2\n"), InputError);
    EXPECT_THROW(parse_csv(""), InputError);
    EXPECT_THROW(parse_csv("a\nnan\n"), InputError);
}

TEST(PagJson, RoundTrip) {
    auto pag = truth_pag(augment(confounded_colliders(), {}), {"X1", "X2", "X3", "X4"}).pag;
    auto j = pag_to_json(pag);
    EXPECT_EQ(j["edges"].size(), 3u);
    EXPECT_EQ(parse_pag(j.dump()), pag);
    auto bad = j;
    bad["marks"][0][2] = 0;
    EXPECT_THROW(parse_pag(bad.dump()), InputError);
}

TEST(ClusteringJson, BothShapes) {
    auto a = parse_clustering(R"([{"latent": "L", "measurements": ["X1", "X2"]}])");
    auto b = parse_clustering(R"({"clustering": [{"latent": "L", "measurements": ["X1", "X2"]}]})");
    EXPECT_EQ(a.latents(), b.latents());
    EXPECT_THROW(parse_clustering(R"([{"latent": "L", "measurements": ["X1"]}])"), InputError);
}

TEST(RankJson, Fields) {
    RankDecision d;
    d.rank = 1;
    d.statistics = {50.0, 1.0};
    d.p_values = {1e-9, 0.3};
    auto j = rank_decision_to_json({"X1", "X2"}, {"X3", "X4"}, d);
    EXPECT_EQ(j["method"], "cca");
    EXPECT_EQ(j["rank"], 1);
    EXPECT_DOUBLE_EQ(j["statistic"].get<double>(), 1.0);
    EXPECT_EQ(j["p_values"].size(), 2u);
}
