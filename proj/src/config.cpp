#include "distmon/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "distmon/error.hpp"

namespace distmon {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::vector<ConfigEntry> kEmpty;

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
    ConfigDocument doc;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw ParseError(line_no, "", "malformed section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            doc.sections_[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(line_no, "", "empty key");
        if (current.empty()) throw ParseError(line_no, std::string(key), "key outside of any [section]");
        doc.sections_[current].push_back({line_no, std::string(key), std::string(trim(line.substr(eq + 1)))});
    }
    return doc;
}

const std::vector<ConfigEntry>& ConfigDocument::section(const std::string& name) const {
    const auto it = sections_.find(name);
    return it == sections_.end() ? kEmpty : it->second;
}

const ConfigEntry* ConfigDocument::find(const std::string& sec, const std::string& key) const {
    const ConfigEntry* found = nullptr;
    for (const auto& e : section(sec))
        if (e.key == key) found = &e;
    return found;
}

std::vector<const ConfigEntry*> ConfigDocument::find_all(const std::string& sec, const std::string& key) const {
    std::vector<const ConfigEntry*> out;
    for (const auto& e : section(sec))
        if (e.key == key) out.push_back(&e);
    return out;
}

std::optional<double> ConfigDocument::number(const std::string& sec, const std::string& key) const {
    if (const auto* e = find(sec, key)) return parse_number(*e);
    return std::nullopt;
}

double ConfigDocument::number_or(const std::string& sec, const std::string& key, double fallback) const {
    return number(sec, key).value_or(fallback);
}

std::vector<double> parse_numbers(const ConfigEntry& entry) {
    std::vector<double> out;
    const std::string& s = entry.value;
    const char* p = s.data();
    const char* end = s.data() + s.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == ',')) ++p;
        if (p == end) break;
        double v = 0.0;
        const char* start = (*p == '+') ? p + 1 : p;
        const auto [ptr, ec] = std::from_chars(start, end, v);
        if (ec != std::errc{} || (ptr < end && *ptr != ' ' && *ptr != '\t' && *ptr != ','))
            throw ParseError(entry.line, entry.key, "not a number: '" + s + "'");
        if (!std::isfinite(v)) throw ParseError(entry.line, entry.key, "non-finite number");
        out.push_back(v);
        p = ptr;
    }
    return out;
}

double parse_number(const ConfigEntry& entry) {
    const auto v = parse_numbers(entry);
    if (v.size() != 1) throw ParseError(entry.line, entry.key, "expected exactly one number");
    return v.front();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace distmon
