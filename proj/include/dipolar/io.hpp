// Deterministic result serialization: structured text records and CSV
// tables.  Numeric output uses shortest round-trip decimal so identical
// runs are byte-identical.

#ifndef DIPOLAR_IO_HPP
#define DIPOLAR_IO_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dipolar {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Flat ordered key/value record, rendered as "key = value" lines.
struct ResultRecord {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) {
        entries.emplace_back(key, value);
    }
    void add(const std::string& key, double value) {
        entries.emplace_back(key, format_double(value));
    }
    void add(const std::string& key, int value) {
        entries.emplace_back(key, std::to_string(value));
    }

    void render(std::ostream& os) const {
        for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
    }
};

// RFC-4180-style field quoting (only needed if a field contains a
// comma, quote, or newline; numeric fields never do).
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void render(std::ostream& os) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << csv_escape(header[i]);
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << csv_escape(row[i]);
            os << "\n";
        }
    }
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Renderable>
inline void write_file(const std::string& path, const Renderable& r) {
    std::ofstream os(path, std::ios::binary); // binary: no platform EOL mangling
    if (!os) throw IoError("cannot open for writing: " + path);
    r.render(os);
    if (!os) throw IoError("write failed: " + path);
}

} // namespace dipolar

#endif
