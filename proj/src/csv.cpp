#include "spinherald/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace spinherald {

namespace {

const std::vector<std::string>& expected_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {"index", "phi_raw"};
        for (int j = 1; j <= 12; ++j) c.push_back("ref_" + std::to_string(j));
        c.insert(c.end(), {"click", "excitation_present", "n_atoms"});
        return c;
    }();
    return cols;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    const auto& cols = expected_columns();
    for (size_t c = 0; c < cols.size(); ++c)
        out << cols[c] << (c + 1 < cols.size() ? "," : "\n");
    for (const auto& rec : ds.records) {
        out << rec.index << ',' << format_double(rec.phi_raw);
        for (double r : rec.references) out << ',' << format_double(r);
        out << ',' << (rec.click ? 1 : 0) << ',' << (rec.excitation_present ? 1 : 0)
            << ',' << rec.n_atoms << '\n';
    }
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_dataset_csv(ds, out);
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset CSV is empty (missing header)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);
    const auto& cols = expected_columns();
    std::string missing;
    for (size_t c = 0; c < cols.size(); ++c) {
        if (c >= header.size() || header[c] != cols[c])
            missing += (missing.empty() ? "" : ", ") + cols[c];
    }
    if (!missing.empty())
        throw std::runtime_error("dataset CSV schema mismatch, missing/misplaced columns: " + missing);

    Dataset ds;
    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != cols.size())
            throw std::runtime_error("dataset CSV row " + std::to_string(line_no) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(cols.size()));
        MeasurementRecord rec;
        try {
            rec.index = std::stoll(fields[0]);
            rec.phi_raw = std::stod(fields[1]);
            for (int j = 0; j < 12; ++j) rec.references[j] = std::stod(fields[2 + j]);
            rec.click = std::stoi(fields[14]) != 0;
            rec.excitation_present = std::stoi(fields[15]) != 0;
            rec.n_atoms = std::stoll(fields[16]);
        } catch (const std::exception&) {
            throw std::runtime_error("dataset CSV row " + std::to_string(line_no) +
                                     ": unparseable field");
        }
        ds.records.push_back(rec);
    }
    return ds;
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    return read_dataset_csv(in);
}

}  // namespace spinherald
