#include "sieve/csv.hpp"

#include "sieve/error.hpp"

namespace sieve {

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out.push_back(',');
        out += csv_escape(fields[i]);
    }
    return out;
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            current.push_back(c);
            ++i;
            continue;
        }
        if (c == '"' && current.empty()) {
            in_quotes = true;
            ++i;
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            ++i;
            continue;
        }
        current.push_back(c);
        ++i;
    }
    if (in_quotes)
        throw Error("unterminated quote in CSV record");
    fields.push_back(std::move(current));
    return fields;
}

bool csv_record_complete(std::string_view partial) {
    std::size_t quotes = 0;
    for (char c : partial)
        if (c == '"')
            ++quotes;
    return quotes % 2 == 0;
}

} // namespace sieve
