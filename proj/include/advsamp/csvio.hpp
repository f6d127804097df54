#pragma once

#include <string>
#include <vector>

#include "advsamp/potentials.hpp"

namespace advsamp {

// Round-trippable decimal formatting (17 significant digits).
std::string format_double(double v);

// Dataset CSV: header x1,...,xd,energy,f1,...,fd; one sample per row.
void write_dataset_csv(const std::vector<LabeledSample>& data, const std::string& path);
std::vector<LabeledSample> read_dataset_csv(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace advsamp
