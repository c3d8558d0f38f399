#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace distmon {

/// One `key = value` line from a config document.
struct ConfigEntry {
    int line = 0;
    std::string key;
    std::string value;
};

/// Flat key/value text with `[section]` headers. `#` starts a comment.
/// Keys may repeat inside a section (e.g. roi vertices).
class ConfigDocument {
public:
    static ConfigDocument parse(std::string_view text);

    bool has_section(const std::string& name) const { return sections_.count(name) != 0; }
    const std::vector<ConfigEntry>& section(const std::string& name) const;

    /// Last value of `key` in `section`, if any.
    const ConfigEntry* find(const std::string& section, const std::string& key) const;
    std::vector<const ConfigEntry*> find_all(const std::string& section, const std::string& key) const;

    /// Throws ParseError if a present value does not parse as a number.
    std::optional<double> number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key, double fallback) const;

private:
    std::map<std::string, std::vector<ConfigEntry>> sections_;
};

/// Parses whitespace-separated decimals; throws ParseError naming `line`/`field`.
std::vector<double> parse_numbers(const ConfigEntry& entry);
double parse_number(const ConfigEntry& entry);

std::string read_file(const std::string& path);

}  // namespace distmon
