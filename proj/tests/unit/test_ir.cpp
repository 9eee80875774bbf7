#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "fixtures.hpp"
#include "hetsim/error.hpp"
#include "hetsim/ir.hpp"
#include "hetsim/model_io.hpp"

using namespace hetsim;
using ir::LayerKind;
using ir::ModelGraph;

namespace {

bool depends_on(const ModelGraph& g, std::size_t from, std::size_t target) {
  std::vector<std::size_t> stack = {from};
  std::vector<char> seen(g.size(), 0);
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (auto p : g.predecessor_indices(i)) {
      if (p == target) return true;
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("single pointwise document loads as one layer without edges") {
  const auto g = ir::load_model(R"({"name":"pw","class":"CNN","layers":[
    {"id":"pw1","kind":"PointwiseConv","ci":128,"co":128,"hi":35}]})");
  REQUIRE(g.size() == 1);
  CHECK(g.layer(0).conv.ho == 35);
  CHECK(g.layer(0).conv.wo == 35);
  CHECK(g.layer(0).conv.kh == 1);
  CHECK(g.predecessor_indices(0).empty());
}

TEST_CASE("an LSTM layer with T=2 expands into 18 descriptors") {
  const auto g = ir::load_model(R"({"name":"l","class":"LSTM","layers":[
    {"id":"rnn","kind":"LstmLayer","d":1024,"h":1024,"t":2}]})");
  REQUIRE(g.size() == 18);
  const auto combine1 = *g.index_of("rnn.t1.combine");
  int hidden_t2 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& l = g.layer(i);
    if (l.kind == LayerKind::LstmGate && l.timestep == 2 && l.mvm == ir::MvmRole::Hidden) {
      ++hidden_t2;
      REQUIRE(g.predecessor_indices(i).size() == 1);
      CHECK(g.predecessor_indices(i)[0] == combine1);
    }
  }
  CHECK(hidden_t2 == 4);
  const auto& c1 = g.layer(combine1);
  CHECK(c1.predecessors.size() == 8);
}

TEST_CASE("LSTM expansion yields 9T descriptors and chains timesteps") {
  for (std::int64_t t : {1, 3, 7}) {
    const auto g = fixtures::lstm_model(32, 16, t);
    CHECK(g.size() == static_cast<std::size_t>(9 * t));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& l = g.layer(i);
      if (l.kind != LayerKind::LstmGate || l.mvm != ir::MvmRole::Hidden || l.timestep == 1) continue;
      // Every gate MVM of the previous timestep is an ancestor.
      for (std::size_t j = 0; j < g.size(); ++j)
        if (g.layer(j).kind == LayerKind::LstmGate && g.layer(j).timestep == l.timestep - 1)
          CHECK(depends_on(g, i, j));
    }
  }
}

TEST_CASE("dangling predecessor is a structural error") {
  CHECK_THROWS_AS(ir::load_model(R"({"name":"x","class":"CNN","layers":[
    {"id":"a","kind":"FullyConnected","ci":4,"co":4,"predecessors":["ghost"]}]})"),
                  StructuralError);
}

TEST_CASE("duplicate ids are rejected") {
  auto a = fixtures::fc("a", 2, 2);
  CHECK_THROWS_AS(ModelGraph::build("m", ir::ModelClass::CNN, {a, a}), StructuralError);
}

TEST_CASE("cycles are reported with the ids on the cycle") {
  auto a = fixtures::fc("a", 2, 2);
  auto b = fixtures::fc("b", 2, 2);
  auto c = fixtures::fc("c", 2, 2);
  a.predecessors = {"c"};
  b.predecessors = {"a"};
  c.predecessors = {"b"};
  try {
    ModelGraph::build("m", ir::ModelClass::CNN, {a, b, c});
    FAIL("no error");
  } catch (const StructuralError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cycle") != std::string::npos);
    for (const char* id : {"a", "b", "c"}) CHECK(msg.find(id) != std::string::npos);
  }
}

TEST_CASE("layers are stored in a stable topological order") {
  auto a = fixtures::fc("a", 2, 2);
  auto b = fixtures::fc("b", 2, 2);
  auto c = fixtures::fc("c", 2, 2);
  a.predecessors = {"c"};
  const auto g = ModelGraph::build("m", ir::ModelClass::CNN, {a, b, c});
  CHECK(g.layer(0).id == "b");
  CHECK(g.layer(1).id == "c");
  CHECK(g.layer(2).id == "a");
}

TEST_CASE("descriptor validation") {
  SECTION("depthwise needs ci == co") {
    auto d = fixtures::conv("d", LayerKind::DepthwiseConv, 10, 8, 0, 3);
    d.conv.co = 16;
    CHECK_THROWS_AS(ir::validate_descriptor(d), ValidationError);
  }
  SECTION("pointwise needs a 1x1 kernel") {
    auto d = fixtures::conv("p", LayerKind::PointwiseConv, 10, 8, 8, 1);
    d.conv.kh = 3;
    CHECK_THROWS_AS(ir::validate_descriptor(d), ValidationError);
  }
  SECTION("output dims must match input, kernel and stride") {
    auto d = fixtures::conv("c", LayerKind::StandardConv, 10, 8, 8, 3, 2);
    CHECK(d.conv.ho == 4);
    CHECK_NOTHROW(ir::validate_descriptor(d));
    d.conv.ho = 5;
    CHECK_THROWS_AS(ir::validate_descriptor(d), ValidationError);
  }
  SECTION("dimensions must be positive") {
    auto d = fixtures::fc("f", 0, 8);
    CHECK_THROWS_AS(ir::validate_descriptor(d), ValidationError);
  }
  SECTION("gates carry both roles") {
    auto g = fixtures::gate(8, 8);
    g.mvm.reset();
    CHECK_THROWS_AS(ir::validate_descriptor(g), ValidationError);
  }
  SECTION("timestep within [1, t]") {
    auto g = fixtures::gate(8, 8, 2, 1, ir::MvmRole::Input, 3);
    CHECK_THROWS_AS(ir::validate_descriptor(g), ValidationError);
  }
}

TEST_CASE("transducer topology") {
  const ir::RecurrentShape s{512, 512, 4, 1};
  SECTION("joint FC consumes both stacks") {
    const auto g = ir::build_transducer("t", {s, s}, {s, s}, {{"", 512, 256, 8}});
    const auto& joint = g.layer(*g.index_of("joint1"));
    CHECK(joint.predecessors.size() == 2);
    CHECK(g.model_class() == ir::ModelClass::Transducer);
  }
  SECTION("36 descriptors per single-layer stack plus the FC") {
    const auto g = ir::build_transducer("t", {s}, {s}, {{"", 512, 256, 8}});
    CHECK(g.size() == 2 * 36 + 1);
  }
  SECTION("empty components are rejected") {
    CHECK_THROWS_AS(ir::build_transducer("t", {}, {s}, {{"", 1, 1, 8}}), ValidationError);
    CHECK_THROWS_AS(ir::build_transducer("t", {s}, {}, {{"", 1, 1, 8}}), ValidationError);
    CHECK_THROWS_AS(ir::build_transducer("t", {s}, {s}, {}), ValidationError);
  }
}

TEST_CASE("loader errors name the offending field") {
  auto message = [](const char* doc) {
    try {
      ir::load_model(doc);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"name":"x","class":"CNN","layers":[{"id":"a","kind":"StandardConv","hi":8,"co":4,"kh":3}]})")
            .find("'ci'") != std::string::npos);
  CHECK(message(R"({"name":"x","class":"CNN","layers":[{"id":"a","kind":"Nope"}]})").find("kind") !=
        std::string::npos);
  CHECK(message(R"({"class":"CNN","layers":[]})").find("name") != std::string::npos);
  CHECK(message(R"({"name":"x","class":"Blob","layers":[]})").find("class") != std::string::npos);
  CHECK_THROWS_AS(ir::load_model("{not json"), ParseError);
  CHECK_THROWS_AS(ir::load_model(R"({"name":"x","class":"CNN","layers":[
    {"id":"a","kind":"DepthwiseConv","hi":8,"ci":4,"co":8,"kh":3}]})"),
                  ValidationError);
}

TEST_CASE("references to an LstmLayer resolve to its combine stages") {
  const auto g = ir::load_model(R"({"name":"s","class":"RCNN","layers":[
    {"id":"conv","kind":"StandardConv","hi":10,"ci":3,"co":8,"kh":3},
    {"id":"a","kind":"LstmLayer","d":64,"h":64,"t":3,"predecessors":["conv"]},
    {"id":"b","kind":"LstmLayer","d":64,"h":64,"t":3,"predecessors":["a"]},
    {"id":"fc","kind":"FullyConnected","ci":64,"co":10,"predecessors":["b"]}]})");
  CHECK(g.layer(*g.index_of("b.t2.input.x")).predecessors == std::vector<std::string>{"a.t2.combine"});
  CHECK(g.layer(*g.index_of("a.t3.forget.x")).predecessors == std::vector<std::string>{"conv"});
  CHECK(g.layer(*g.index_of("fc")).predecessors == std::vector<std::string>{"b.t3.combine"});
}

TEST_CASE("serialize then load gives back an equal graph") {
  const auto lstm = fixtures::lstm_model(24, 16, 3, 2);
  CHECK(ir::load_model(ir::serialize_model(lstm)) == lstm);
  const auto t = ir::build_transducer("t", {{16, 16, 2, 1}}, {{16, 16, 1, 1}}, {{"", 32, 8, 8}});
  CHECK(ir::load_model(ir::serialize_model(t)) == t);

  synth::Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto g = fixtures::random_model(rng, "m" + std::to_string(k));
    const auto back = ir::load_model(ir::serialize_model(g));
    REQUIRE(back == g);
    CHECK(ir::serialize_model(back) == ir::serialize_model(g));
  }
}

TEST_CASE("enum names round-trip") {
  for (auto k : {LayerKind::StandardConv, LayerKind::DepthwiseConv, LayerKind::PointwiseConv,
                 LayerKind::FullyConnected, LayerKind::LstmGate, LayerKind::LstmCellCombine})
    CHECK(ir::parse_layer_kind(ir::to_string(k)) == k);
  for (auto g : ir::kGateOrder) CHECK(ir::parse_gate_role(ir::to_string(g)) == g);
  CHECK_FALSE(ir::parse_model_class("MLP").has_value());
}
