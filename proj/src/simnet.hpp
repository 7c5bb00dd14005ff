#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "block.hpp"

namespace oram3 {

/// Parties on the wire: servers 0..2 plus the client.
inline constexpr int kClient = 3;

inline const char* party_name(int p) {
  switch (p) {
    case 0: return "s0";
    case 1: return "s1";
    case 2: return "s2";
    default: return "client";
  }
}

enum class EventKind : std::uint8_t { read_req, read_resp, write_req, relay };

inline const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::read_req: return "read_req";
    case EventKind::read_resp: return "read_resp";
    case EventKind::write_req: return "write_req";
    default: return "relay";
  }
}

/// One message on the simulated wire. `array` is a server-local slot id
/// (resolve names through SimNet::array_name); `index` is negative when the
/// event kind carries no physical index.
struct TraceEvent {
  std::uint64_t round = 0;
  std::int8_t sender = 0;
  std::int8_t receiver = 0;
  EventKind kind = EventKind::read_req;
  std::int32_t array = -1;
  std::int64_t index = -1;
  std::uint32_t size_blocks = 0;
};

/// Canonical order for replaying a trace: by round, then by the lower party id on
/// the link. With one block per pair per round the tie-break never fires, but
/// the comparator is the documented contract for consumers.
bool trace_event_before(const TraceEvent& a, const TraceEvent& b);

/// Receives every event as it happens. Implementations must not call back
/// into the net.
class TraceSink {
public:
  virtual ~TraceSink() = default;
  virtual void on_event(const TraceEvent& ev) = 0;
};

/// Stores the full event stream (small runs only; audits on big runs should
/// use SkeletonSink).
class VectorSink : public TraceSink {
public:
  void on_event(const TraceEvent& ev) override { events.push_back(ev); }
  std::vector<TraceEvent> events;
};

struct BandwidthMeter {
  std::uint64_t blocks = 0;
  std::uint64_t bytes = 0;
};

/// Client-relayed network over three passive storage servers. Servers only
/// answer single-block reads and writes; anything that "moves" between
/// servers passes through the client and is metered accordingly. One block
/// per party pair per round; the round clock never decreases.
class SimNet {
public:
  struct ArrayHandle {
    std::int8_t server = -1;
    std::int32_t slot = -1;
    bool valid() const { return server >= 0; }
  };

  SimNet() = default;

  // ---- array lifecycle (bookkeeping only, no wire traffic) ----
  ArrayHandle alloc(int server, std::string_view role, std::size_t n, std::size_t width,
                    bool read_once_guard = false);
  void free_array(ArrayHandle h);
  /// Appends b's blocks to a and frees b; both must live on the same server
  /// with equal widths. Pure renaming of what the server already holds.
  void concat(ArrayHandle a, ArrayHandle b);
  /// Shrinks the array to its first n blocks.
  void truncate(ArrayHandle h, std::size_t n);

  std::size_t array_size(ArrayHandle h) const;
  std::size_t array_width(ArrayHandle h) const;
  const std::string& array_name(ArrayHandle h) const;
  const std::string& array_name(int server, std::int32_t slot) const;

  // ---- metered operations ----
  const Block& read_block(ArrayHandle h, std::size_t i);
  void write_block(ArrayHandle h, std::size_t i, const Block& b);
  /// Copies src to a fresh array on dst_server through the client: one read
  /// and one write per block plus a relay marker event.
  ArrayHandle relay_array(ArrayHandle src, int dst_server, std::string_view role);

  std::uint64_t round() const { return round_; }
  const BandwidthMeter& meter() const { return meter_; }
  void reset_meter() { meter_ = BandwidthMeter{}; }

  void set_sink(TraceSink* sink) { sink_ = sink; }

  // ---- unmetered test-only inspection ----
  const Block& peek(ArrayHandle h, std::size_t i) const;
  std::uint64_t live_arrays() const;

private:
  struct StoredArray {
    std::string name;
    std::vector<Block> data;
    std::vector<std::uint8_t> touched;  // read-once guard bitmap
    std::uint32_t width = 0;
    bool guard = false;
    bool live = false;
  };
  struct Store {
    std::vector<StoredArray> arrays;
    std::vector<std::int32_t> free_slots;
  };

  StoredArray& at(ArrayHandle h);
  const StoredArray& at(ArrayHandle h) const;
  void emit(const TraceEvent& ev) { if (sink_) sink_->on_event(ev); }

  Store stores_[3];
  std::uint64_t round_ = 0;
  std::uint64_t name_seq_ = 0;
  BandwidthMeter meter_;
  TraceSink* sink_ = nullptr;
};

/// What one corrupt server sees: its own events in full, plus only the
/// round/parties/size shape of traffic between honest parties.
struct PatternEvent {
  std::uint64_t round = 0;
  std::int8_t sender = 0;
  std::int8_t receiver = 0;
  std::uint32_t size_blocks = 0;
};

struct AdversaryView {
  int corrupt = 0;
  std::vector<TraceEvent> events;
  std::vector<PatternEvent> honest_pattern;
};

AdversaryView extract_view(const std::vector<TraceEvent>& trace, int corrupt);

/// JSON Lines export, one event per object:
/// {"round","sender","receiver","kind","array","index","size_blocks"}.
/// index is null for kinds that carry none; array is null likewise.
void write_trace_jsonl(std::ostream& os, const std::vector<TraceEvent>& trace, const SimNet& net);

/// Content-stripped pattern skeleton: everything an access-pattern audit may
/// compare (round, parties, kind, array role, size) and nothing data-carrying
/// (no contents, no physical indices). Byte-comparable across runs.
class SkeletonSink : public TraceSink {
public:
  explicit SkeletonSink(const SimNet& net) : net_(net) {}
  void on_event(const TraceEvent& ev) override;
  const std::string& bytes() const { return buf_; }

private:
  const SimNet& net_;
  std::string buf_;
};

}  // namespace oram3
