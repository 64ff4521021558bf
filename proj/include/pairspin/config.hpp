#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairspin {

// Line-oriented `key = value` config with one [section] per subcommand.
// Command-line flags override file values; duplicates and syntax errors are
// reported with their line number.
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

class ConfigFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static ConfigFile parse(std::istream& in) {
        ConfigFile cfg;
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string body = strip(line.substr(0, line.find_first_of("#;")));
            if (body.empty()) continue;
            if (body.front() == '[') {
                if (body.back() != ']') throw ConfigError(lineno, "unterminated section header");
                section = strip(body.substr(1, body.size() - 2));
                if (section.empty()) throw ConfigError(lineno, "empty section name");
                continue;
            }
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError(lineno, "expected key = value, got '" + body + "'");
            const std::string key = strip(body.substr(0, eq));
            const std::string value = strip(body.substr(eq + 1));
            if (key.empty()) throw ConfigError(lineno, "empty key");
            auto& sec = cfg.sections_[section];
            if (sec.count(key))
                throw ConfigError(lineno, "duplicate key '" + key + "' (first at line " +
                                              std::to_string(sec[key].line) + ")");
            sec[key] = Entry{value, lineno};
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read config file " + path);
        return parse(in);
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    const Entry& get(const std::string& section, const std::string& key) const {
        return sections_.at(section).at(key);
    }

    const std::map<std::string, std::map<std::string, Entry>>& sections() const {
        return sections_;
    }

private:
    static std::string strip(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return {};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace pairspin
