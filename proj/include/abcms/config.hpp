#pragma once

#include <map>
#include <string>
#include <vector>

namespace abcms {

// key = value files; '#' starts a comment; whitespace trimmed.
class KeyValueConfig {
public:
    KeyValueConfig() = default;
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get(const std::string& key, double fallback) const;
    long get(const std::string& key, long fallback) const;
    // comma-separated list of reals
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace abcms
