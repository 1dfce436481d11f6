#pragma once

#include <string>
#include <vector>

#include "lem/distribution.hpp"

namespace lem {

// Generation observations bucketed by (month, hour). Within one bucket the
// k-th observation belongs to the k-th recorded day of that month.
struct SampleGrid {
    int months = 0;
    int hours = 0;
    std::vector<std::vector<std::vector<double>>> samples;  // [month][hour][day]

    const std::vector<double>& bucket(int month, int hour) const;  // 1-based
    std::vector<std::vector<GenerationDistribution>> build_distributions() const;
    void validate_complete() const;  // every bucket nonempty
};

// Reads `month,hour,value_mw` rows (header required). Malformed rows and
// missing buckets are reported with their location.
SampleGrid ingest_generation_csv(const std::string& path, int months, int hours);

}  // namespace lem
