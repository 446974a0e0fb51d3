#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace netinf {

// One trace row per processed event plus any rows handlers append directly.
// `detail` is flat "key=value" text, space separated, no commas or newlines.
struct TraceRow {
    double time = 0.0;
    std::string node;  // node id or "-"
    std::string kind;
    std::string detail;
};

class Trace {
public:
    void append(double time, std::string node, std::string kind, std::string detail);
    const std::vector<TraceRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<TraceRow> rows_;
};

// Small helper for building "k=v k2=v2" detail strings deterministically.
class Detail {
public:
    Detail& kv(const std::string& key, const std::string& value);
    Detail& kv(const std::string& key, double value);      // fixed 6 decimals
    Detail& kv(const std::string& key, long long value);
    Detail& kv(const std::string& key, std::size_t value);
    std::string str() const { return text_; }

private:
    std::string text_;
};

// CSV columns, in order: time,node,event_kind,detail. Times use fixed
// 6-decimal precision so identical runs produce byte-identical files.
void write_trace_csv(const Trace& trace, std::ostream& out);
Trace read_trace_csv(std::istream& in);  // throws SimError naming the bad row

// Parses "k=v k2=v2" detail text into a map.
std::map<std::string, std::string> parse_detail(const std::string& detail);

} // namespace netinf
