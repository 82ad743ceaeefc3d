#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kernelrmt/concentration.hpp"
#include "kernelrmt/data_models.hpp"
#include "kernelrmt/spectral.hpp"
#include "kernelrmt/sym_matrix.hpp"

namespace kernelrmt {

/// Shortest form that never loses information: 17 significant digits.
std::string format_double(double v);
/// Strict parse of a decimal; throws IoError on trailing garbage.
double parse_double(const std::string& s);

// DataMatrix: first line "n,p,model_tag,seed" (values), then n lines of p values.
void write_data_csv(std::ostream& os, const DataMatrix& x);
DataMatrix read_data_csv(std::istream& is);

// SymMatrix: first line n, then line i holds the upper-triangle entries
// (i,i), (i,i+1), ..., (i,n-1); n(n+1)/2 values in total.
void write_sym_csv(std::ostream& os, const SymMatrix& m);
SymMatrix read_sym_csv(std::istream& is);

// Spectrum: header "eigenvalue", then one eigenvalue per line, ascending.
void write_spectrum_csv(std::ostream& os, const SpectralDistribution& d);
SpectralDistribution read_spectrum_csv(std::istream& is);

// Stieltjes samples: header "re_z,im_z,re_w,im_w".
void write_stieltjes_csv(std::ostream& os, const std::vector<std::pair<Complex, Complex>>& rows);

// Histogram: header "bin_left,count".
void write_histogram_csv(std::ostream& os, const Histogram& h);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace kernelrmt
