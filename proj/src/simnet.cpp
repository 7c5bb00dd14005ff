#include "simnet.hpp"

#include <ostream>
#include <stdexcept>

#include "errors.hpp"

namespace oram3 {

bool trace_event_before(const TraceEvent& a, const TraceEvent& b) {
  if (a.round != b.round) return a.round < b.round;
  int pa = a.sender < a.receiver ? a.sender : a.receiver;
  int pb = b.sender < b.receiver ? b.sender : b.receiver;
  return pa < pb;
}

SimNet::StoredArray& SimNet::at(ArrayHandle h) {
  if (!h.valid() || h.server > 2) throw std::invalid_argument("bad array handle");
  auto& arr = stores_[h.server].arrays.at(static_cast<std::size_t>(h.slot));
  if (!arr.live) throw std::invalid_argument("array already freed");
  return arr;
}

const SimNet::StoredArray& SimNet::at(ArrayHandle h) const {
  return const_cast<SimNet*>(this)->at(h);
}

SimNet::ArrayHandle SimNet::alloc(int server, std::string_view role, std::size_t n,
                                  std::size_t width, bool read_once_guard) {
  if (server < 0 || server > 2) throw std::invalid_argument("bad server id");
  Store& st = stores_[server];
  std::int32_t slot;
  if (!st.free_slots.empty()) {
    slot = st.free_slots.back();
    st.free_slots.pop_back();
  } else {
    slot = static_cast<std::int32_t>(st.arrays.size());
    st.arrays.emplace_back();
  }
  StoredArray& arr = st.arrays[static_cast<std::size_t>(slot)];
  arr.name.assign(role);
  arr.name += '#';
  arr.name += std::to_string(name_seq_++);
  arr.data.assign(n, Block(width));
  arr.width = static_cast<std::uint32_t>(width);
  arr.guard = read_once_guard;
  arr.touched.assign(read_once_guard ? n : 0, 0);
  arr.live = true;
  return ArrayHandle{static_cast<std::int8_t>(server), slot};
}

void SimNet::free_array(ArrayHandle h) {
  StoredArray& arr = at(h);
  arr.live = false;
  arr.data.clear();
  arr.data.shrink_to_fit();
  arr.touched.clear();
  arr.touched.shrink_to_fit();
  stores_[h.server].free_slots.push_back(h.slot);
}

void SimNet::concat(ArrayHandle a, ArrayHandle b) {
  if (a.server != b.server) throw std::invalid_argument("concat across servers");
  StoredArray& dst = at(a);
  StoredArray& src = at(b);
  if (dst.width != src.width) throw std::invalid_argument("concat width mismatch");
  dst.data.insert(dst.data.end(), src.data.begin(), src.data.end());
  if (dst.guard) dst.touched.assign(dst.data.size(), 0);
  free_array(b);
}

void SimNet::truncate(ArrayHandle h, std::size_t n) {
  StoredArray& arr = at(h);
  if (n > arr.data.size()) throw std::invalid_argument("truncate grows array");
  arr.data.resize(n);
  if (arr.guard) arr.touched.resize(n);
}

std::size_t SimNet::array_size(ArrayHandle h) const { return at(h).data.size(); }
std::size_t SimNet::array_width(ArrayHandle h) const { return at(h).width; }
const std::string& SimNet::array_name(ArrayHandle h) const { return at(h).name; }
const std::string& SimNet::array_name(int server, std::int32_t slot) const {
  return stores_[server].arrays.at(static_cast<std::size_t>(slot)).name;
}

const Block& SimNet::read_block(ArrayHandle h, std::size_t i) {
  StoredArray& arr = at(h);
  if (i >= arr.data.size()) throw std::out_of_range("read_block index");
  if (arr.guard) {
    if (arr.touched[i]) throw ProtocolError("read-once violation on " + arr.name);
    arr.touched[i] = 1;
  }
  meter_.blocks += 1;
  meter_.bytes += arr.width;
  if (sink_) {
    TraceEvent req{round_, static_cast<std::int8_t>(kClient), h.server,
                   EventKind::read_req, h.slot, static_cast<std::int64_t>(i), 0};
    TraceEvent resp{round_, h.server, static_cast<std::int8_t>(kClient),
                    EventKind::read_resp, h.slot, -1, 1};
    emit(req);
    emit(resp);
  }
  round_ += 1;
  return arr.data[i];
}

void SimNet::write_block(ArrayHandle h, std::size_t i, const Block& b) {
  StoredArray& arr = at(h);
  if (i >= arr.data.size()) throw std::out_of_range("write_block index");
  if (b.width() != arr.width) throw std::invalid_argument("write_block width mismatch");
  arr.data[i] = b;
  meter_.blocks += 1;
  meter_.bytes += arr.width;
  if (sink_) {
    TraceEvent ev{round_, static_cast<std::int8_t>(kClient), h.server,
                  EventKind::write_req, h.slot, static_cast<std::int64_t>(i), 1};
    emit(ev);
  }
  round_ += 1;
}

SimNet::ArrayHandle SimNet::relay_array(ArrayHandle src, int dst_server, std::string_view role) {
  std::size_t n = array_size(src);
  std::size_t w = array_width(src);
  ArrayHandle dst = alloc(dst_server, role, n, w);
  for (std::size_t i = 0; i < n; ++i) {
    Block b = read_block(src, i);
    write_block(dst, i, b);
  }
  if (sink_) {
    TraceEvent marker{round_, src.server, static_cast<std::int8_t>(dst_server),
                      EventKind::relay, dst.slot, -1, 0};
    emit(marker);
  }
  return dst;
}

const Block& SimNet::peek(ArrayHandle h, std::size_t i) const {
  const StoredArray& arr = at(h);
  return arr.data.at(i);
}

std::uint64_t SimNet::live_arrays() const {
  std::uint64_t n = 0;
  for (const Store& st : stores_)
    for (const StoredArray& a : st.arrays)
      if (a.live) ++n;
  return n;
}

AdversaryView extract_view(const std::vector<TraceEvent>& trace, int corrupt) {
  AdversaryView v;
  v.corrupt = corrupt;
  for (const TraceEvent& ev : trace) {
    if (ev.sender == corrupt || ev.receiver == corrupt) {
      v.events.push_back(ev);
    } else {
      v.honest_pattern.push_back(PatternEvent{ev.round, ev.sender, ev.receiver, ev.size_blocks});
    }
  }
  return v;
}

void write_trace_jsonl(std::ostream& os, const std::vector<TraceEvent>& trace, const SimNet& net) {
  for (const TraceEvent& ev : trace) {
    os << "{\"round\":" << ev.round
       << ",\"sender\":\"" << party_name(ev.sender)
       << "\",\"receiver\":\"" << party_name(ev.receiver)
       << "\",\"kind\":\"" << kind_name(ev.kind) << "\"";
    int server = ev.kind == EventKind::relay || ev.sender == kClient ? ev.receiver : ev.sender;
    if (ev.array >= 0)
      os << ",\"array\":\"" << net.array_name(server, ev.array) << "\"";
    else
      os << ",\"array\":null";
    if (ev.index >= 0)
      os << ",\"index\":" << ev.index;
    else
      os << ",\"index\":null";
    os << ",\"size_blocks\":" << ev.size_blocks << "}\n";
  }
}

void SkeletonSink::on_event(const TraceEvent& ev) {
  buf_ += std::to_string(ev.round);
  buf_ += '|';
  buf_ += party_name(ev.sender);
  buf_ += '|';
  buf_ += party_name(ev.receiver);
  buf_ += '|';
  buf_ += kind_name(ev.kind);
  buf_ += '|';
  if (ev.array >= 0) {
    int server = ev.kind == EventKind::relay || ev.sender == kClient ? ev.receiver : ev.sender;
    buf_ += net_.array_name(server, ev.array);
  }
  buf_ += '|';
  buf_ += std::to_string(ev.size_blocks);
  buf_ += '\n';
}

}  // namespace oram3
