#include <sstream>

#include <gtest/gtest.h>

#include "kernelrmt/csv_io.hpp"
#include "kernelrmt/errors.hpp"
#include "kernelrmt/kernel_build.hpp"

using namespace kernelrmt;

TEST(CsvIo, DoubleRoundTrip) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.5x"), IoError);
  EXPECT_THROW(parse_double(""), IoError);
}

TEST(CsvIo, DataMatrixRoundTrip) {
  const DataMatrix x = gen_standard(7, 5, make_cov(CovSpec::identity(), 5), EntryDist::gaussian(), 12);
  std::stringstream ss;
  write_data_csv(ss, x);
  const DataMatrix y = read_data_csv(ss);
  EXPECT_EQ(y.rows(), x.rows());
  EXPECT_EQ(y.model_tag(), x.model_tag());
  EXPECT_EQ(y.seed(), x.seed());
}

TEST(CsvIo, SymMatrixRoundTrip) {
  const DataMatrix x = gen_sphere(6, 4, 3);
  const SymMatrix m = build_inner_kernel(x, KernelSpec::gaussian(0.3));
  std::stringstream ss;
  write_sym_csv(ss, m);
  EXPECT_EQ(read_sym_csv(ss).dense(), m.dense());
}

TEST(CsvIo, SpectrumAndHistogram) {
  const SpectralDistribution d({3.0, 1.0, 2.0});
  std::stringstream ss;
  write_spectrum_csv(ss, d);
  EXPECT_EQ(ss.str().substr(0, 11), "eigenvalue\n");
  const SpectralDistribution e = read_spectrum_csv(ss);
  EXPECT_EQ(std::vector<double>(e.values().begin(), e.values().end()), (std::vector<double>{1.0, 2.0, 3.0}));

  std::ostringstream hs;
  write_histogram_csv(hs, make_histogram({1.0, 1.0, 1.0}));
  EXPECT_EQ(hs.str(), "bin_left,count\n1,3\n");

  std::ostringstream st;
  write_stieltjes_csv(st, {{Complex(1.0, 0.5), Complex(-0.25, 2.0)}});
  EXPECT_EQ(st.str(), "re_z,im_z,re_w,im_w\n1,0.5,-0.25,2\n");
}

TEST(CsvIo, MalformedInputThrows) {
  std::istringstream bad("2,2,x,0\n1,2\n3\n");
  EXPECT_THROW(read_data_csv(bad), IoError);
  std::istringstream bad_sym("2\n1,2\n");
  EXPECT_THROW(read_sym_csv(bad_sym), IoError);
  EXPECT_THROW(read_text_file("/nonexistent/dir/file.csv"), IoError);
}
