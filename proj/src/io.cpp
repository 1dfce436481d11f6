#include "lem/io.hpp"

#include <fstream>
#include <sstream>
#include <cctype>
#include <stdexcept>

namespace lem {

const std::vector<double>& SampleGrid::bucket(int month, int hour) const {
    if (month < 1 || month > months || hour < 1 || hour > hours) {
        throw std::invalid_argument("SampleGrid: bucket index out of range");
    }
    return samples[std::size_t(month - 1)][std::size_t(hour - 1)];
}

std::vector<std::vector<GenerationDistribution>> SampleGrid::build_distributions() const {
    validate_complete();
    std::vector<std::vector<GenerationDistribution>> out{std::size_t(months)};
    for (int m = 0; m < months; ++m) {
        out[std::size_t(m)].reserve(std::size_t(hours));
        for (int t = 0; t < hours; ++t) {
            out[std::size_t(m)].push_back(
                GenerationDistribution::from_samples(samples[std::size_t(m)][std::size_t(t)]));
        }
    }
    return out;
}

void SampleGrid::validate_complete() const {
    for (int m = 0; m < months; ++m) {
        for (int t = 0; t < hours; ++t) {
            if (samples[std::size_t(m)][std::size_t(t)].empty()) {
                throw std::runtime_error("generation data: no samples for month " +
                                         std::to_string(m + 1) + ", hour " + std::to_string(t + 1));
            }
        }
    }
}

SampleGrid ingest_generation_csv(const std::string& path, int months, int hours) {
    if (months < 1 || hours < 1) {
        throw std::invalid_argument("ingest_generation_csv: bad grid dimensions");
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open generation CSV: " + path);

    SampleGrid grid;
    grid.months = months;
    grid.hours = hours;
    grid.samples.assign(std::size_t(months),
                        std::vector<std::vector<double>>(std::size_t(hours)));

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    // Tolerate a UTF-8 BOM and whitespace in the header check.
    std::string header;
    for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c)) && static_cast<unsigned char>(c) < 0x80) {
            header += char(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    if (header != "month,hour,value_mw") {
        throw std::runtime_error(path + ": expected header 'month,hour,value_mw'");
    }

    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string f1, f2, f3;
        if (!std::getline(ss, f1, ',') || !std::getline(ss, f2, ',') || !std::getline(ss, f3)) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(row));
        }
        int month, hour;
        double value;
        try {
            month = std::stoi(f1);
            hour = std::stoi(f2);
            value = std::stod(f3);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(row));
        }
        if (month < 1 || month > months || hour < 1 || hour > hours) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": (month, hour) outside the configured grid");
        }
        if (!(value >= 0.0)) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": negative or invalid value");
        }
        grid.samples[std::size_t(month - 1)][std::size_t(hour - 1)].push_back(value);
    }

    for (int m = 1; m <= months; ++m) {
        for (int t = 1; t <= hours; ++t) {
            if (grid.bucket(m, t).empty()) {
                throw std::runtime_error(path + ": no rows for month " + std::to_string(m) +
                                         ", hour " + std::to_string(t));
            }
        }
    }
    return grid;
}

}  // namespace lem
