#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "posw/cumulants.hpp"
#include "posw/ensemble.hpp"

namespace posw {

/// Header of the shared series CSV.
inline constexpr const char* kSeriesCsvHeader =
    "t,mean_Xa,se_Xa,mean_n_a,se_n_a,mean_Xb,se_Xb,n_effective,diverged_fraction";

/// Writes the series with round-trip precision, one row per grid point.
void write_series_csv(std::ostream& os, const ObservableSeries& s);
std::string series_csv(const ObservableSeries& s);

/// Parses a series CSV. Throws ValidationError on a header or row that does not match
/// the schema.
ObservableSeries read_series_csv(std::istream& is);
ObservableSeries read_series_csv(const std::filesystem::path& path);

/// Cumulant table with analytic targets for the given kappa:
/// monomial,real,imag,se_real,se_imag,target_real,target_imag
std::string cumulant_csv(const CumulantTable& table, double kappa);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace posw
