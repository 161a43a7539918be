#pragma once

// Dataset CSV schema: index, phi_raw, ref_1..ref_12, click,
// excitation_present, n_atoms. Header row mandatory, deterministic order.

#include <iosfwd>
#include <string>

#include "spinherald/simulate.hpp"

namespace spinherald {

void write_dataset_csv(const Dataset& ds, std::ostream& out);
void write_dataset_csv(const Dataset& ds, const std::string& path);

// Throws std::runtime_error listing missing columns on schema mismatch.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

}  // namespace spinherald
