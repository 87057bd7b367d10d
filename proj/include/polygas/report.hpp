#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace polygas {

/// One CSV file's worth of rows; every cell is already formatted.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

struct Report {
    std::string command;
    std::string mode;
    std::uint64_t seed = 0;
    std::string model;
    int status = 0;
    /// File stem -> table; "report" is always written.
    std::map<std::string, Table> tables;
    std::vector<std::string> notes;
};

std::string csv_escape(const std::string& cell);
std::string to_csv(const Table& table);

/// <dir>/<stem>.csv for every table and <dir>/report.json mirroring all of them.
void write_report(const Report& report, const std::filesystem::path& dir);

} // namespace polygas
