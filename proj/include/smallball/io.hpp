#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smallball/charfn.hpp"
#include "smallball/smallball.hpp"
#include "smallball/spectrum.hpp"

namespace smallball {

/// Full-precision decimal rendering (17 significant digits).
std::string full_digits(double x);

void write_spectrum_csv(std::ostream& os, const Spectrum& sp);
void write_roots_csv(std::ostream& os, const RootList& roots);
void write_report_csv(std::ostream& os, const std::vector<SmallBallReport>& rows);
void write_kernel_grid_csv(std::ostream& os, const Kernel& k, int grid);

nlohmann::json spectrum_json(const Spectrum& sp);
nlohmann::json roots_json(const RootList& roots);
nlohmann::json report_json(const std::vector<SmallBallReport>& rows);

/// Stable output envelope shared by every CLI command.
nlohmann::json envelope(const std::string& command, nlohmann::json config,
                        nlohmann::json data);

} // namespace smallball
