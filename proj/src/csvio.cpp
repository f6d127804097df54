#include "advsamp/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "advsamp/errors.hpp"

namespace advsamp {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    return fields;
}

void write_dataset_csv(const std::vector<LabeledSample>& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot open dataset file for writing: " + path);
    const int d = data.empty() ? 0 : data.front().configuration.dim();
    for (int j = 0; j < d; ++j) out << 'x' << (j + 1) << ',';
    out << "energy";
    for (int j = 0; j < d; ++j) out << ",f" << (j + 1);
    out << '\n';
    for (const auto& s : data) {
        if (s.configuration.dim() != d || s.forces.size() != d) {
            throw Error::input_error("write_dataset_csv: inconsistent sample dimensions");
        }
        for (int j = 0; j < d; ++j) out << format_double(s.configuration.coords[j]) << ',';
        out << format_double(s.energy);
        for (int j = 0; j < d; ++j) out << ',' << format_double(s.forces[j]);
        out << '\n';
    }
}

std::vector<LabeledSample> read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error::input_error("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error::input_error("dataset file is empty: " + path);
    const auto header = split_csv_line(line);
    int d = 0;
    while (d < static_cast<int>(header.size()) && header[d] == "x" + std::to_string(d + 1)) ++d;
    if (d == 0 || static_cast<int>(header.size()) != 2 * d + 1 || header[d] != "energy") {
        throw Error::input_error("dataset file has a malformed header: " + path);
    }

    std::vector<LabeledSample> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 2 * d + 1) {
            throw Error::input_error("dataset row has wrong field count in " + path);
        }
        LabeledSample s;
        s.configuration.coords.resize(d);
        s.forces.resize(d);
        auto parse = [&](const std::string& f) {
            double v;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc()) throw Error::input_error("bad number in dataset: " + f);
            return v;
        };
        for (int j = 0; j < d; ++j) s.configuration.coords[j] = parse(fields[j]);
        s.energy = parse(fields[d]);
        for (int j = 0; j < d; ++j) s.forces[j] = parse(fields[d + 1 + j]);
        data.push_back(std::move(s));
    }
    return data;
}

}  // namespace advsamp
