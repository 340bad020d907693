#pragma once

#include <map>
#include <string>

#include "adgve/common.hpp"

namespace adgve {

// Flat "section.key = value" configuration. Lines starting with '#' and
// blank lines are ignored. Unknown keys are kept (callers may namespace
// freely); typed getters fall back to built-in defaults.
class Config {
public:
    Config();

    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;

    // Canonical text form (sorted keys) and its checksum, embedded in reports.
    std::string canonical_text() const;
    std::string checksum() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace adgve
