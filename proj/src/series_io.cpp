#include "posw/series_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "posw/errors.hpp"

namespace posw {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("series CSV line " + std::to_string(line_no) +
                              ": not a number: '" + s + "'");
    }
}

}  // namespace

void write_series_csv(std::ostream& os, const ObservableSeries& s) {
    os << kSeriesCsvHeader << '\n';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < s.size(); ++k) {
        os << s.times[k];
        for (std::size_t i = 0; i < kObservableCount; ++i) {
            os << ',' << s.mean[k][i] << ',' << s.std_error[k][i];
        }
        os << ',' << s.n_effective[k] << ',' << s.diverged_fraction << '\n';
    }
}

std::string series_csv(const ObservableSeries& s) {
    std::ostringstream os;
    write_series_csv(os, s);
    return os.str();
}

ObservableSeries read_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("series CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSeriesCsvHeader) {
        throw ValidationError("series CSV header mismatch: '" + line + "'");
    }
    ObservableSeries s;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9) {
            throw ValidationError("series CSV line " + std::to_string(line_no) + ": expected 9 "
                                  "fields, got " + std::to_string(f.size()));
        }
        s.times.push_back(parse_double(f[0], line_no));
        ObservableValues mean{}, se{};
        for (std::size_t i = 0; i < kObservableCount; ++i) {
            mean[i] = parse_double(f[1 + 2 * i], line_no);
            se[i] = parse_double(f[2 + 2 * i], line_no);
        }
        s.mean.push_back(mean);
        s.std_error.push_back(se);
        s.n_effective.push_back(static_cast<std::uint64_t>(parse_double(f[7], line_no)));
        s.diverged_fraction = parse_double(f[8], line_no);
    }
    if (!s.n_effective.empty()) s.n_traj = s.n_effective.front();
    return s;
}

ObservableSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open series file " + path.string());
    return read_series_csv(in);
}

std::string cumulant_csv(const CumulantTable& table, double kappa) {
    std::ostringstream os;
    os << "monomial,real,imag,se_real,se_imag,target_real,target_imag\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& e : table.entries) {
        const cplx target = sigma_cumulant_target(e.indices, kappa);
        os << monomial_name(e.indices) << ',' << e.value.real() << ',' << e.value.imag() << ','
           << e.se_real << ',' << e.se_imag << ',' << target.real() << ',' << target.imag()
           << '\n';
    }
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace posw
