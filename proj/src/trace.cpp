#include "netinf/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "netinf/errors.hpp"

namespace netinf {

namespace {

std::string format_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

void check_field(const std::string& s) {
    if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
        throw SimError("trace field must not contain commas or newlines: " + s);
    }
}

} // namespace

void Trace::append(double time, std::string node, std::string kind, std::string detail) {
    check_field(node);
    check_field(kind);
    check_field(detail);
    rows_.push_back(TraceRow{time, std::move(node), std::move(kind), std::move(detail)});
}

Detail& Detail::kv(const std::string& key, const std::string& value) {
    if (!text_.empty()) text_ += ' ';
    text_ += key;
    text_ += '=';
    text_ += value;
    return *this;
}

Detail& Detail::kv(const std::string& key, double value) {
    return kv(key, format_time(value));
}

Detail& Detail::kv(const std::string& key, long long value) {
    return kv(key, std::to_string(value));
}

Detail& Detail::kv(const std::string& key, std::size_t value) {
    return kv(key, std::to_string(value));
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "time,node,event_kind,detail\n";
    for (const auto& row : trace.rows()) {
        out << format_time(row.time) << ',' << row.node << ',' << row.kind << ','
            << row.detail << '\n';
    }
}

Trace read_trace_csv(std::istream& in) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line != "time,node,event_kind,detail") {
                throw SimError("trace row 1: unexpected header: " + line);
            }
            continue;
        }
        if (line.empty()) continue;
        auto c1 = line.find(',');
        auto c2 = (c1 == std::string::npos) ? std::string::npos : line.find(',', c1 + 1);
        auto c3 = (c2 == std::string::npos) ? std::string::npos : line.find(',', c2 + 1);
        if (c3 == std::string::npos) {
            throw SimError("trace row " + std::to_string(lineno) + ": expected 4 columns: " + line);
        }
        TraceRow row;
        try {
            row.time = std::stod(line.substr(0, c1));
        } catch (const std::exception&) {
            throw SimError("trace row " + std::to_string(lineno) + ": bad time: " + line);
        }
        row.node = line.substr(c1 + 1, c2 - c1 - 1);
        row.kind = line.substr(c2 + 1, c3 - c2 - 1);
        row.detail = line.substr(c3 + 1);
        trace.append(row.time, row.node, row.kind, row.detail);
    }
    return trace;
}

std::map<std::string, std::string> parse_detail(const std::string& detail) {
    std::map<std::string, std::string> out;
    std::istringstream is(detail);
    std::string token;
    while (is >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        out[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return out;
}

} // namespace netinf
