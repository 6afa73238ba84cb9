#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pairsim {

// locale independent; shortest round-trip form when digits == 0
std::string format_number(double v, int digits = 9);
std::string format_number(std::uint64_t v);

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(std::uint64_t v);
    CsvTable& add(const std::string& s);

    std::string str() const;
    void write(const std::string& path) const; // throws IoError

    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> column(const std::string& name) const;
};
CsvData read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);

} // namespace pairsim
