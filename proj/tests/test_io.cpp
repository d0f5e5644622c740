// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semcomm/io.hpp"

using namespace semcomm;

namespace {

const char* kLine =
    "id,x0,weight,label_parity\n"
    "a,0,0.25,even\n"
    "b,1,0.25,odd\n"
    "c,2,0.25,even\n"
    "d,3,0.25,odd\n";

template <class F>
ParseError parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError");
  return ParseError("", 0, 0);
}

}  // namespace

TEST_CASE("inputs csv: coordinates, weights and label columns") {
  const auto t = parse_inputs_csv(kLine);
  CHECK(t.ids == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(t.space.size() == 4);
  CHECK(t.space.point(3) == Point{3.0});
  CHECK(t.space.is_uniform());
  REQUIRE(t.attribute_names == std::vector<std::string>{"label_parity"});
  CHECK(t.attributes[0].label_count() == 2);
  CHECK(t.attributes[0][0] == t.attributes[0][2]);
  CHECK(t.attributes[0][0] != t.attributes[0][1]);
}

TEST_CASE("inputs csv: comments, blank lines, quoting and missing weights") {
  const auto t = parse_inputs_csv("# two points\nid,x0,x1\n\n\"p,1\",1,2\n\"q\"\"\",-1e-3,4\n");
  CHECK(t.ids == std::vector<std::string>{"p,1", "q\""});
  CHECK(t.space.point(1) == Point{-1e-3, 4.0});
  CHECK(t.space.weight(0) == 0.5);
}

TEST_CASE("inputs csv: weights near one are renormalized, others rejected") {
  const auto t = parse_inputs_csv("id,x0,weight\na,0,0.3333333\nb,1,0.6666666\n");
  CHECK(std::abs(t.space.weight(0) + t.space.weight(1) - 1.0) < 1e-15);
  CHECK_THROWS_AS(parse_inputs_csv("id,x0,weight\na,0,0.3\nb,1,0.3\n"), ParseError);
  CHECK_THROWS_AS(parse_inputs_csv("id,x0,weight\na,0,0\nb,1,1\n"), ParseError);
}

TEST_CASE("inputs csv: errors carry line and column") {
  auto e = parse_error([] { parse_inputs_csv("id,x0\na,0\nb,zero\n"); });
  CHECK(e.line() == 3);
  CHECK(e.column() == 3);
  e = parse_error([] { parse_inputs_csv("id,x0\na,0\nb,1,2\n"); });
  CHECK(e.line() == 3);
  CHECK_THROWS_AS(parse_inputs_csv("id,x0\na,0\na,1\n"), ParseError);
  CHECK_THROWS_AS(parse_inputs_csv("name,x0\na,0\n"), ParseError);
  CHECK_THROWS_AS(parse_inputs_csv("id,x0\na,\"0\n"), ParseError);
}

TEST_CASE("inputs json mirrors csv") {
  const auto j = parse_inputs_json(R"({"inputs":[
    {"id":"a","x":[0],"weight":0.25,"labels":{"label_parity":"even"}},
    {"id":"b","x":[1],"weight":0.25,"labels":{"label_parity":"odd"}},
    {"id":"c","x":[2],"weight":0.25,"labels":{"label_parity":"even"}},
    {"id":"d","x":[3],"weight":0.25,"labels":{"label_parity":"odd"}}]})");
  const auto c = parse_inputs_csv(kLine);
  CHECK(j.ids == c.ids);
  for (Index i = 0; i < 4; ++i) {
    CHECK(j.space.point(i) == c.space.point(i));
    CHECK(j.space.weight(i) == c.space.weight(i));
    CHECK(j.attributes[0][i] == c.attributes[0][i]);
  }
  CHECK_THROWS_AS(parse_inputs_json(R"({"inputs":[{"id":"a"}]})"), ParseError);
  CHECK_THROWS_AS(parse_inputs_json("{"), ParseError);
}

TEST_CASE("inputs csv round trip") {
  const auto t = parse_inputs_csv(kLine);
  const auto u = parse_inputs_csv(inputs_csv(t));
  CHECK(u.ids == t.ids);
  for (Index i = 0; i < 4; ++i) {
    CHECK(u.space.point(i) == t.space.point(i));
    CHECK(u.space.weight(i) == t.space.weight(i));
  }
  CHECK(u.attribute_names == t.attribute_names);
}

TEST_CASE("protocol csv: symbol strings over a product space") {
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  const auto p = parse_protocol_csv("id,message\nb,1\na,0\nc,1\nd,0\n", ids);
  CHECK(p.messages.is_product());
  CHECK(p.messages.vocab() == 2);
  CHECK(p.messages.size() == 2);
  CHECK(p.protocol == Protocol({0, 1, 1, 0}, p.protocol.message_count()));

  const auto wide = parse_protocol_csv("id,message\na,03\nb,10\nc,10\nd,00\n", ids, {.vocab = 5});
  CHECK(wide.messages.vocab() == 5);
  CHECK(wide.messages.length() == 2);
  CHECK(wide.messages.size() == 25);
  CHECK(wide.messages.distance(wide.protocol[0], wide.protocol[3]) == 1.0);
  CHECK(wide.messages.distance(wide.protocol[0], wide.protocol[1]) == 2.0);
}

TEST_CASE("protocol csv: large products fall back to the used messages") {
  const std::vector<std::string> ids{"a", "b"};
  const auto p = parse_protocol_csv("id,message\na,000000\nb,999999\n", ids);
  CHECK_FALSE(p.messages.is_product());
  CHECK(p.messages.size() == 2);
  CHECK(p.messages.distance(0, 1) == 6.0);
}

TEST_CASE("protocol csv: euclidean messages") {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto p = parse_protocol_csv("id,message\na,0;0\nb,3;4\nc,0;0\n", ids, {.metric = MessageMetric::Euclidean});
  CHECK(p.messages.size() == 2);
  CHECK(p.protocol == Protocol({0, 1, 0}, p.protocol.message_count()));
  CHECK(p.messages.distance(0, 1) == 5.0);
}

TEST_CASE("protocol csv: errors") {
  const std::vector<std::string> ids{"a", "b"};
  CHECK_THROWS_AS(parse_protocol_csv("id,message\na,0\n", ids), ParseError);
  CHECK_THROWS_AS(parse_protocol_csv("id,message\na,0\nb,0\nz,1\n", ids), ParseError);
  CHECK_THROWS_AS(parse_protocol_csv("id,message\na,0\nb,01\n", ids), ParseError);
  CHECK_THROWS_AS(parse_protocol_csv("id,message\na,0\na,1\n", ids), ParseError);
  CHECK_THROWS_AS(parse_protocol_csv("id,message\na,?\nb,1\n", ids), ParseError);
}

TEST_CASE("protocol json and csv round trip") {
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  const auto j = parse_protocol_json(R"({"assignment":[{"id":"a","message":"0"},{"id":"b","message":"2"},
    {"id":"c","message":"2"},{"id":"d","message":"1"}]})", ids);
  CHECK(j.protocol == Protocol({0, 2, 2, 1}, j.protocol.message_count()));
  const auto back = parse_protocol_csv(protocol_csv(ids, j.protocol, j.messages), ids);
  CHECK(back.protocol == j.protocol);
  CHECK(back.messages.size() == j.messages.size());
}

TEST_CASE("labels csv") {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto [names, maps] = parse_labels_csv("id,colour,size\nc,red,big\na,red,small\nb,blue,big\n", ids);
  CHECK(names == std::vector<std::string>{"colour", "size"});
  CHECK(maps[0][0] == maps[0][2]);
  CHECK(maps[1][1] == maps[1][2]);
  CHECK_THROWS_AS(parse_labels_csv("id,colour\na,red\nb,blue\n", ids), ParseError);
}

TEST_CASE("receiver json round trip") {
  const auto messages = MessageSpace::symbol_product(2, 1);
  const auto space = InputSpace::uniform({{0}, {1}, {2}, {3}});
  const Protocol p({0, 0, 1, 1}, 2);

  const Receiver reco = synchronized_reconstruction_receiver(p, space);
  const auto r = receiver_from_json(receiver_json(reco, messages, 4), messages, 4);
  CHECK(std::get<ReconstructionReceiver>(r).at(1) == Point{2.5});

  const Receiver glob = synchronized_global_receiver(p, space);
  const auto g = receiver_from_json(receiver_json(glob, messages, 4), messages, 4);
  CHECK(std::get<GlobalReceiver>(g).at(0) == std::vector<double>{0.5, 0.5, 0.0, 0.0});

  const Receiver disc = synchronized_discrimination_receiver(p, 2);
  const auto d = receiver_from_json(receiver_json(disc, messages, 4), messages, 4);
  const std::vector<Index> tuple{0, 3};
  CHECK(std::get<DiscriminationReceiver>(d)(0, tuple) == std::vector<double>{1.0, 0.0});
  CHECK(tabulate(std::get<DiscriminationReceiver>(d), 4) == tabulate(std::get<DiscriminationReceiver>(disc), 4));
}
