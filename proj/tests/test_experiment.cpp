#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "kernelrmt/csv_io.hpp"
#include "kernelrmt/errors.hpp"
#include "kernelrmt/experiment.hpp"

using namespace kernelrmt;
namespace fs = std::filesystem;

namespace {

ExperimentConfig config(const std::string& body) { return parse_config(body); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kernelrmt_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesFullDocument) {
  const ExperimentConfig c = config(R"({
    "experiment": "esd_weak",
    "model": {"generator": "standard", "cov": {"kind": "ar1", "rho": 0.3},
              "dist": {"kind": "student_t", "df": 9}},
    "kernel": {"kind": "tanh", "a": 0.1, "b": 0.5, "form": "distance"},
    "dims": [[20, 10], [40, 20]], "repeats": 3, "seed": 18446744073709551615,
    "approx_inputs_source": "plugin", "output_dir": "res", "rescale": true,
    "rate": {"kind": "moment", "m": 8, "eps": 0.2}
  })");
  EXPECT_EQ(c.experiment, ExperimentKind::esd_weak);
  EXPECT_EQ(c.form, KernelForm::distance);
  EXPECT_EQ(c.dims.size(), 2u);
  EXPECT_EQ(c.repeats, 3u);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.approx_source, ApproxInputs::Source::plugin);
  EXPECT_EQ(c.model.cov.kind, CovSpec::Kind::ar1);
  EXPECT_EQ(c.model.dist.kind, EntryDist::Kind::student_t);
  EXPECT_EQ(c.rate.kind, RateSpec::Kind::moment);
  EXPECT_TRUE(c.rescale);
  EXPECT_EQ(c.output_dir, fs::path("res"));
}

TEST(Config, RejectsInvalidDocuments) {
  const char* bad[] = {
      "not json",
      R"({"dims": [[10, 10]]})",
      R"({"experiment": "nope", "dims": [[10, 10]]})",
      R"({"experiment": "mp_baseline", "dims": []})",
      R"({"experiment": "mp_baseline", "dims": [[10, 10]], "repeats": 0})",
      R"({"experiment": "mp_baseline", "dims": [[10, 10], [10, 10]]})",
      R"({"experiment": "mp_baseline", "dims": [[10, 20]]})",
      R"({"experiment": "mp_baseline", "dims": [[10, 10]], "typo": 1})",
      R"({"experiment": "convergence_strong", "dims": [[10, 10]]})",
      R"({"experiment": "convergence_strong", "kernel": {"kind": "gaussian", "form": "sideways"}, "dims": [[10, 10]]})",
      R"({"experiment": "convergence_strong", "kernel": {"kind": "gaussian"}, "model": {"generator": "copula"},
          "dims": [[10, 10]]})",
      R"({"experiment": "largest_eig", "model": {"dist": {"kind": "student_t", "df": 3}}, "dims": [[10, 10]]})",
      R"({"experiment": "largest_eig", "model": {"cov": {"kind": "diagonal", "values": [1, 2]}}, "dims": [[10, 3]]})",
      R"({"experiment": "largest_eig", "model": {"generator": "lb_ball", "b": 3}, "dims": [[10, 3]]})",
  };
  for (const char* doc : bad) EXPECT_THROW(config(doc), ConfigError) << doc;
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Seeds, StableAndDistinct) {
  const auto s = repeat_seed(1, "convergence_strong", 100, 100, 0);
  EXPECT_EQ(s, repeat_seed(1, "convergence_strong", 100, 100, 0));
  EXPECT_NE(s, repeat_seed(1, "convergence_strong", 100, 100, 1));
  EXPECT_NE(s, repeat_seed(1, "esd_weak", 100, 100, 0));
  EXPECT_NE(s, repeat_seed(2, "convergence_strong", 100, 100, 0));
  EXPECT_NE(s, repeat_seed(1, "convergence_strong", 100, 101, 0));
}

TEST(Seeds, AddingDimsKeepsExistingStreams) {
  const std::string base = R"("experiment": "largest_eig", "repeats": 2, "seed": 5)";
  const auto a = run_experiment(config("{" + base + R"(, "dims": [[30, 10]]})"));
  const auto b = run_experiment(config("{" + base + R"(, "dims": [[20, 20], [30, 10]]})"));
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(a[0].metrics, b[2].metrics);
  EXPECT_EQ(a[1].metrics, b[3].metrics);
}

TEST(ConvergenceStrong, LinearKernelExactAndSmoke) {
  for (const char* form : {"inner", "distance"}) {
    const ExperimentConfig c = config(std::string(R"({"experiment": "convergence_strong",
        "kernel": {"kind": "linear", "a": 2, "b": -1, "form": ")") + form + R"("},
        "dims": [[60, 40], [100, 100]], "repeats": 2, "seed": 3})");
    const auto recs = run_convergence_strong(c);
    ASSERT_EQ(recs.size(), 4u);
    for (const auto& r : recs) {
      EXPECT_LT(r.metrics.at("op_norm_gap"), 1e-10);
      EXPECT_LE(r.metrics.at("max_eig_gap"), r.metrics.at("op_norm_gap") + 1e-12);
    }
  }
  const auto one = run_experiment(config(R"({"experiment": "convergence_strong",
      "kernel": {"kind": "gaussian", "gamma": 1}, "dims": [[100, 100]], "seed": 1})"));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].experiment, "convergence_strong");
  EXPECT_NEAR(one[0].metrics.at("v_p"), std::exp(-1.0), 1e-15);
  EXPECT_GE(one[0].metrics.at("principal_angle"), 0.0);
  EXPECT_THROW(run_esd_weak(config(R"({"experiment": "convergence_strong",
      "kernel": {"kind": "gaussian"}, "dims": [[10, 10]]})")),
               ConfigError);
}

TEST(EsdWeak, LinearDistanceWithinTwoOverN) {
  const ExperimentConfig c = config(R"({"experiment": "esd_weak", "model": {"generator": "sphere"},
      "kernel": {"kind": "linear", "a": 1.5, "b": 0.5, "form": "distance"},
      "dims": [[80, 100]], "repeats": 3, "seed": 8})");
  for (const auto& r : run_esd_weak(c)) EXPECT_LE(r.metrics.at("kolmogorov"), 2.0 / 80.0);
}

TEST(EsdWeak, ConcentrationGeneratorsSmoke) {
  for (const char* model : {R"({"generator": "copula", "cov": {"kind": "ar1", "rho": 0.2}})",
                            R"({"generator": "lb_ball", "b": 1.3})"}) {
    const auto recs = run_esd_weak(config(std::string(R"({"experiment": "esd_weak", "model": )") + model +
                                          R"(, "kernel": {"kind": "gaussian"}, "approx_inputs_source": "plugin",
                                             "dims": [[100, 100]], "seed": 2})"));
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_LE(recs[0].metrics.at("kolmogorov"), 1.0);
  }
}

TEST(MpBaseline, SmallCaseAndEdge) {
  const auto recs = run_mp_baseline(config(R"({"experiment": "mp_baseline", "dims": [[4, 2]], "seed": 1})"));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_DOUBLE_EQ(recs[0].metrics.at("rho"), 0.5);
  EXPECT_DOUBLE_EQ(recs[0].metrics.at("edge"), std::pow(1.0 + std::sqrt(0.5), 2));
  const auto wide = run_largest_eig(config(R"({"experiment": "largest_eig", "dims": [[50, 200]], "seed": 1})"));
  EXPECT_DOUBLE_EQ(wide[0].metrics.at("rho"), 4.0);
  EXPECT_LT(wide[0].metrics.at("edge_error") / wide[0].metrics.at("edge"), 0.15);
}

TEST(Concentration, SphereDiagonalExact) {
  const auto recs = run_concentration(config(R"({"experiment": "concentration", "model": {"generator": "sphere"},
      "dims": [[50, 100], [50, 300]], "seed": 3})"));
  for (const auto& r : recs) EXPECT_LE(r.metrics.at("max_diag_dev"), 1e-12);
}

TEST(Degeneracy, Underflow) {
  const auto recs = run_gaussian_degeneracy(
      config(R"({"experiment": "gaussian_degeneracy", "gamma": 1, "dims": [[100, 100]], "seed": 1})"));
  EXPECT_LE(recs[0].metrics.at("degeneracy_gap"), std::max(1e-300, recs[0].metrics.at("underflow_bound")));
}

TEST(Laplacian, LinearKernelDecreases) {
  const ExperimentConfig c = config(R"({"experiment": "laplacian", "kernel": {"kind": "linear", "a": 1, "b": 0.5},
      "dims": [[200, 200], [400, 400], [800, 800]], "repeats": 1, "seed": 4})");
  const auto m = medians_by_dims(c, run_laplacian(c), "laplacian_gap");
  EXPECT_GT(m[0], m[1]);
  EXPECT_GT(m[1], m[2]);
}

TEST(Centering, ContractionForAllSlots) {
  for (const char* slots : {R"({"left": true, "right": true})", R"({"left": true, "right": false})",
                            R"({"left": false, "right": true})"}) {
    const auto recs = run_centering(config(std::string(R"({"experiment": "centering",
        "kernel": {"kind": "gaussian"}, "center": )") + slots +
                                           R"(, "dims": [[60, 60]], "repeats": 2, "seed": 6})"));
    for (const auto& r : recs) {
      EXPECT_EQ(r.metrics.at("contraction_holds"), 1.0);
      EXPECT_LE(r.metrics.at("centered_gap"), r.metrics.at("op_norm_gap") * (1 + 1e-10) + 1e-12);
    }
  }
}

TEST(Runner, ParallelMatchesSerialAndCounts) {
  const ExperimentConfig c = config(R"({"experiment": "convergence_strong", "kernel": {"kind": "gaussian"},
      "dims": [[40, 30], [50, 50], [30, 60]], "repeats": 3, "seed": 9})");
  const auto serial = run_experiment(c, 1);
  const auto parallel = run_experiment(c, 4);
  ASSERT_EQ(serial.size(), 9u);
  ASSERT_EQ(parallel.size(), 9u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].n, parallel[i].n);
    EXPECT_EQ(serial[i].repeat, parallel[i].repeat);
    EXPECT_EQ(serial[i].metrics, parallel[i].metrics);
  }
  EXPECT_EQ(serial[0].n, 40u);
  EXPECT_EQ(serial[8].n, 30u);
  EXPECT_EQ(serial[8].repeat, 2u);
}

TEST(Runner, EvaluationFailurePropagates) {
  const ExperimentConfig c = config(R"({"experiment": "convergence_strong", "kernel": {"kind": "power", "a": 0.5},
      "dims": [[20, 1]], "approx_inputs_source": "plugin", "seed": 1})");
  EXPECT_THROW(run_experiment(c, 2), EvaluationError);
}

TEST(Emit, HeaderOnlyAndSingleRow) {
  const ExperimentConfig c = config(R"({"experiment": "centering", "kernel": {"kind": "gaussian"},
      "dims": [[20, 20]], "seed": 11})");
  const std::string empty = records_to_csv(ExperimentKind::centering, {});
  EXPECT_EQ(empty, "experiment,n,p,repeat,seed,centered_gap,op_norm_gap,contraction_holds\n");

  const auto recs = run_centering(c);
  const std::string csv = records_to_csv(ExperimentKind::centering, recs);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  const std::string row = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 7);
  EXPECT_EQ(row.find(",,"), std::string::npos);

  const fs::path dir = scratch("emit");
  const auto files = emit(c, {}, OutputFormat::csv, dir);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].filename(), "centering_20x20_11.csv");
  EXPECT_EQ(read_text_file(files[0]), empty);
  fs::remove_all(dir);
}

TEST(Emit, JsonRoundTripIsExact) {
  const ExperimentConfig c = config(R"({"experiment": "esd_weak", "kernel": {"kind": "tanh", "a": 0.3, "b": 1.1},
      "dims": [[30, 20], [25, 25]], "repeats": 2, "seed": 12})");
  auto recs = run_esd_weak(c);
  for (auto& r : recs) r.wall_time = 0.0;
  EXPECT_EQ(records_from_json(records_to_json(recs)), recs);
  recs[0].wall_time = 0.123456789012345678;
  EXPECT_EQ(records_from_json(records_to_json(recs, true))[0].wall_time, recs[0].wall_time);
  EXPECT_THROW(records_from_json("{}"), IoError);
}

TEST(Emit, DeterministicBytes) {
  const ExperimentConfig c = config(R"({"experiment": "convergence_strong", "kernel": {"kind": "gaussian"},
      "dims": [[30, 30], [40, 20]], "repeats": 2, "seed": 13})");
  for (OutputFormat f : {OutputFormat::csv, OutputFormat::json}) {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const auto fa = emit(c, run_experiment(c, 1), f, a);
    const auto fb = emit(c, run_experiment(c, 3), f, b);
    ASSERT_EQ(fa.size(), fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(read_text_file(fa[i]), read_text_file(fb[i]));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST(Emit, UnwritableDirectory) {
  const fs::path blocker = scratch("blocker");
  write_text_file(blocker, "file, not a directory");
  const ExperimentConfig c = config(R"({"experiment": "largest_eig", "dims": [[10, 5]], "seed": 1})");
  EXPECT_THROW(emit(c, run_experiment(c), OutputFormat::csv, blocker / "sub"), IoError);
  fs::remove_all(blocker);
}

TEST(Emit, OutputFileName) {
  EXPECT_EQ(output_file_name(ExperimentKind::mp_baseline, 1000, 500, 42, OutputFormat::json),
            "mp_baseline_1000x500_42.json");
  EXPECT_EQ(format_from_string("csv"), OutputFormat::csv);
  EXPECT_THROW(format_from_string("xml"), ConfigError);
}
