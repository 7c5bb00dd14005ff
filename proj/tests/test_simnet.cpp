#include <sstream>

#include "doctest.h"
#include "errors.hpp"
#include "test_util.hpp"

using namespace oram3;

TEST_CASE("read emits request plus response in one round") {
  SimNet net;
  VectorSink sink;
  net.set_sink(&sink);
  auto h = net.alloc(1, "x", 4, 16);
  net.read_block(h, 2);
  net.write_block(h, 3, Block(16));

  REQUIRE(sink.events.size() == 3);
  const TraceEvent& req = sink.events[0];
  CHECK(req.kind == EventKind::read_req);
  CHECK(req.sender == kClient);
  CHECK(req.receiver == 1);
  CHECK(req.index == 2);
  CHECK(req.size_blocks == 0);

  const TraceEvent& resp = sink.events[1];
  CHECK(resp.kind == EventKind::read_resp);
  CHECK(resp.sender == 1);
  CHECK(resp.receiver == kClient);
  CHECK(resp.round == req.round);
  CHECK(resp.index == -1);
  CHECK(resp.size_blocks == 1);

  const TraceEvent& wr = sink.events[2];
  CHECK(wr.kind == EventKind::write_req);
  CHECK(wr.round == resp.round + 1);
  CHECK(wr.size_blocks == 1);
  CHECK(net.round() == 2);
}

TEST_CASE("meter counts blocks and bytes") {
  SimNet net;
  auto h = net.alloc(0, "x", 4, 24);
  net.read_block(h, 0);
  net.write_block(h, 1, Block(24));
  CHECK(net.meter().blocks == 2);
  CHECK(net.meter().bytes == 48);
  net.reset_meter();
  CHECK(net.meter().blocks == 0);
}

TEST_CASE("read-once guard") {
  SimNet net;
  auto h = net.alloc(2, "g", 3, 16, true);
  net.read_block(h, 1);
  CHECK_THROWS_AS(net.read_block(h, 1), ProtocolError);
  net.read_block(h, 0);  // other slots stay readable
}

TEST_CASE("concat and truncate are unmetered renames") {
  SimNet net;
  auto a = net.alloc(0, "a", 2, 16);
  auto b = net.alloc(0, "b", 3, 16);
  net.write_block(b, 0, codec::real_entry(16, 7));
  net.reset_meter();
  net.concat(a, b);
  CHECK(net.meter().blocks == 0);
  CHECK(net.array_size(a) == 5);
  CHECK(net.peek(a, 2) == codec::real_entry(16, 7));
  CHECK_THROWS_AS(net.array_size(b), std::invalid_argument);

  net.truncate(a, 2);
  CHECK(net.array_size(a) == 2);
  CHECK(net.meter().blocks == 0);
  CHECK_THROWS_AS(net.truncate(a, 9), std::invalid_argument);
}

TEST_CASE("alloc names carry a global sequence") {
  SimNet net;
  auto a = net.alloc(0, "x", 1, 16);
  auto b = net.alloc(1, "y", 1, 16);
  CHECK(net.array_name(a) == "x#0");
  CHECK(net.array_name(b) == "y#1");
  net.free_array(a);
  auto c = net.alloc(0, "z", 1, 16);
  CHECK(net.array_name(c) == "z#2");
  CHECK(c.slot == a.slot);  // freed slot is reused
}

TEST_CASE("relay copies through the client") {
  SimNet net;
  VectorSink sink;
  net.set_sink(&sink);
  auto src = net.alloc(0, "src", 2, 16);
  net.write_block(src, 0, codec::real_entry(16, 1));
  net.write_block(src, 1, codec::real_entry(16, 2));
  net.reset_meter();
  sink.events.clear();

  auto dst = net.relay_array(src, 2, "dst");
  CHECK(net.meter().blocks == 4);  // one read and one write per block
  CHECK(net.peek(dst, 1) == codec::real_entry(16, 2));
  CHECK(sink.events.back().kind == EventKind::relay);
  CHECK(sink.events.back().sender == 0);
  CHECK(sink.events.back().receiver == 2);
}

TEST_CASE("adversary view partitions the trace") {
  SimNet net;
  VectorSink sink;
  net.set_sink(&sink);
  auto h0 = net.alloc(0, "a", 1, 16);
  auto h1 = net.alloc(1, "b", 1, 16);
  net.read_block(h0, 0);
  net.write_block(h1, 0, Block(16));
  net.read_block(h1, 0);

  for (int corrupt = 0; corrupt < 3; ++corrupt) {
    AdversaryView v = extract_view(sink.events, corrupt);
    CHECK(v.events.size() + v.honest_pattern.size() == sink.events.size());
    for (const TraceEvent& ev : v.events)
      CHECK((ev.sender == corrupt || ev.receiver == corrupt));
  }
  AdversaryView v0 = extract_view(sink.events, 0);
  CHECK(v0.events.size() == 2);
  CHECK(v0.honest_pattern.size() == 3);
  CHECK(v0.honest_pattern[0].size_blocks == 1);
}

TEST_CASE("jsonl export shape") {
  SimNet net;
  VectorSink sink;
  net.set_sink(&sink);
  auto h = net.alloc(1, "area", 2, 16);
  net.read_block(h, 1);

  std::ostringstream os;
  write_trace_jsonl(os, sink.events, net);
  std::string line0 = os.str().substr(0, os.str().find('\n'));
  CHECK(line0 ==
        "{\"round\":0,\"sender\":\"client\",\"receiver\":\"s1\",\"kind\":\"read_req\","
        "\"array\":\"area#0\",\"index\":1,\"size_blocks\":0}");
  std::string rest = os.str().substr(os.str().find('\n') + 1);
  CHECK(rest.find("\"kind\":\"read_resp\"") != std::string::npos);
  CHECK(rest.find("\"index\":null") != std::string::npos);
}

TEST_CASE("skeleton strips indices but keeps roles") {
  SimNet net;
  SkeletonSink sk(net);
  net.set_sink(&sk);
  auto h = net.alloc(0, "role", 4, 16);
  net.read_block(h, 3);
  CHECK(sk.bytes() == "0|client|s0|read_req|role#0|0\n0|s0|client|read_resp|role#0|1\n");
  CHECK(sk.bytes().find('3') == std::string::npos);
}

TEST_CASE("event replay order") {
  TraceEvent a{5, 0, 3, EventKind::read_req, 0, 0, 0};
  TraceEvent b{6, 0, 3, EventKind::read_req, 0, 0, 0};
  CHECK(trace_event_before(a, b));
  CHECK_FALSE(trace_event_before(b, a));
  TraceEvent c{5, 1, 3, EventKind::read_req, 0, 0, 0};
  CHECK(trace_event_before(a, c));  // same round: lower party pair first
}
