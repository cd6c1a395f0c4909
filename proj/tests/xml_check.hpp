#pragma once

#include <string>
#include <vector>

// Minimal well-formedness check: balanced tags, quoted attributes, a single root.
inline bool well_formed_xml(const std::string& doc, std::string* why = nullptr)
{
    auto fail = [why](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    std::vector<std::string> stack;
    int roots = 0;
    std::size_t i = 0;
    while ((i = doc.find('<', i)) != std::string::npos) {
        if (doc.compare(i, 2, "<?") == 0) {
            const std::size_t end = doc.find("?>", i);
            if (end == std::string::npos) return fail("unterminated declaration");
            i = end + 2;
            continue;
        }
        std::size_t j = i + 1;
        bool quoted = false;
        while (j < doc.size() && (quoted || doc[j] != '>')) {
            if (doc[j] == '"') quoted = !quoted;
            if (!quoted && doc[j] == '<') return fail("'<' inside a tag");
            ++j;
        }
        if (j >= doc.size()) return fail("unterminated tag");
        const std::string tag = doc.substr(i + 1, j - i - 1);
        if (tag.empty()) return fail("empty tag");
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return fail("mismatched </" + tag.substr(1) + ">");
            stack.pop_back();
        } else {
            const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
            if (stack.empty()) ++roots;
            if (tag.back() != '/') stack.push_back(name);
        }
        i = j + 1;
    }
    if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
    if (roots != 1) return fail("expected one root element");
    return true;
}

inline std::size_t count_substr(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (std::size_t i = s.find(needle); i != std::string::npos; i = s.find(needle, i + 1)) ++n;
    return n;
}
