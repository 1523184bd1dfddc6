#pragma once

#include <map>
#include <string>
#include <vector>

namespace stylelab {

// Plain-text run configuration: "[section]" headers over "key = value"
// lines, '#' comments. Unknown keys are a hard error at validation time so
// typos never pass silently. Flags override file values.
struct RunConfig {
    int config_version = 1;
    // section -> key -> value; "" is the top-level section
    std::map<std::string, std::map<std::string, std::string>> sections;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_text(const std::string& text, const std::string& origin = "<string>");
    void write_file(const std::string& path) const;
    std::string to_text() const;

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    // Throws ConfigError when a present section holds a key outside the
    // allowed set.
    void validate_keys(const std::string& section,
                       const std::vector<std::string>& allowed) const;
};

}  // namespace stylelab
