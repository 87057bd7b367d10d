#include "polygas/report.hpp"

#include "polygas/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace polygas {

void Table::add(std::vector<std::string> row)
{
    if (row.size() != columns.size()) {
        throw InvalidArgument("report row has " + std::to_string(row.size()) + " cells for " +
                              std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

std::string csv_escape(const std::string& cell)
{
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        return cell;
    }
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const Table& table)
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += (i ? "," : "") + csv_escape(cells[i]);
        }
        out += "\n";
    };
    line(table.columns);
    for (const auto& r : table.rows) {
        line(r);
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

} // namespace

void write_report(const Report& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    nlohmann::ordered_json j;
    j["header"] = {{"command", report.command},
                   {"mode", report.mode},
                   {"seed", report.seed},
                   {"model", report.model}};
    j["status"] = report.status;
    j["notes"] = report.notes;
    for (const auto& [stem, table] : report.tables) {
        write_file(dir / (stem + ".csv"), to_csv(table));
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : table.rows) {
            nlohmann::ordered_json row;
            for (std::size_t i = 0; i < r.size(); ++i) {
                row[table.columns[i]] = r[i];
            }
            rows.push_back(std::move(row));
        }
        j["tables"][stem] = std::move(rows);
    }
    write_file(dir / "report.json", j.dump(2) + "\n");
}

} // namespace polygas
