#include "stylelab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stylelab/errors.hpp"

namespace stylelab {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + t + "'");
            }
            section = trim(t.substr(1, t.size() - 2));
            cfg.sections[section];
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        if (cfg.sections[section].count(key)) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        }
        if (section.empty() && key == "config_version") {
            cfg.config_version = std::stoi(value);
            continue;
        }
        cfg.sections[section][key] = value;
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << "config_version = " << config_version << "\n";
    for (const auto& [section, kv] : sections) {
        if (!section.empty()) os << "\n[" << section << "]\n";
        for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
    }
    return os.str();
}

void RunConfig::write_file(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw ConfigError("cannot write config file '" + path + "'");
    os << to_text();
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto sit = sections.find(section);
    return sit != sections.end() && sit->second.count(key) > 0;
}

const std::string& RunConfig::get(const std::string& section, const std::string& key) const {
    auto sit = sections.find(section);
    if (sit == sections.end() || !sit->second.count(key)) {
        throw ConfigError("missing config key [" + section + "] " + key);
    }
    return sit->second.at(key);
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections[section][key] = value;
}

void RunConfig::validate_keys(const std::string& section,
                              const std::vector<std::string>& allowed) const {
    auto sit = sections.find(section);
    if (sit == sections.end()) return;
    for (const auto& [key, value] : sit->second) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown config key '" + key + "' in section [" + section + "]");
        }
    }
}

}  // namespace stylelab
