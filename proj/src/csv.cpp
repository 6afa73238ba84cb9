#include "pairsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pairsim/errors.hpp"

namespace pairsim {

std::string format_number(double v, int digits)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        v = 0.0; // drop the sign of -0
    char buf[64];
    std::to_chars_result r = digits > 0
        ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits)
        : std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string format_number(std::uint64_t v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

CsvTable& CsvTable::row()
{
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::add(double v)
{
    rows_.back().push_back(format_number(v));
    return *this;
}

CsvTable& CsvTable::add(std::uint64_t v)
{
    rows_.back().push_back(format_number(v));
    return *this;
}

CsvTable& CsvTable::add(const std::string& s)
{
    rows_.back().push_back(s);
    return *this;
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i)
                out += ',';
            out += v[i];
        }
        out += '\n';
    };
    line(header_);
    for (auto& r : rows_)
        line(r);
    return out;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f)
        throw IoError("write failed: " + path);
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

std::vector<double> CsvData::column(const std::string& name) const
{
    std::size_t k = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            k = i;
    if (k == header.size())
        throw ConfigError("csv: no column named '" + name + "'");
    std::vector<double> v;
    for (auto& r : rows) {
        if (k >= r.size())
            throw ConfigError("csv: short row");
        double x = 0;
        auto res = std::from_chars(r[k].data(), r[k].data() + r[k].size(), x);
        if (res.ec != std::errc())
            throw ConfigError("csv: column '" + name + "' has non-numeric entry '" + r[k] + "'");
        v.push_back(x);
    }
    return v;
}

CsvData read_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open " + path);
    CsvData d;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        if (first) {
            d.header = cells;
            first = false;
        } else {
            d.rows.push_back(cells);
        }
    }
    return d;
}

} // namespace pairsim
