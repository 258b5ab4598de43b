#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "nearlattice/admissibility.hpp"
#include "nearlattice/error.hpp"
#include "nearlattice/snapshot.hpp"
#include "oracles.hpp"

using namespace nearlattice;

namespace {

std::string save(const Configuration& c, std::uint64_t seed = 7, long sweep = 123) {
  std::ostringstream out;
  save_snapshot(out, c, seed, sweep);
  return out.str();
}

Error load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    load_snapshot(in);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return Error(ErrorCode::InvalidArgument, "none");
}

}  // namespace

TEST(Snapshot, FormatDoubleRoundTripsBitExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng) * std::pow(10.0, (i % 13) - 6);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  for (double x : {0.0, -0.0, 1.0 / 3, std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max()}) {
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_THROW(parse_double("1.5x"), Error);
  EXPECT_THROW(parse_double(""), Error);
}

TEST(Snapshot, RoundTripIsBitExact) {
  for (auto kind : {LatticeKind::Triangular2D, LatticeKind::FCC, LatticeKind::HCP}) {
    const double alpha = default_alpha(dimension_of(kind));
    const Configuration c = oracle::chain_samples(kind, 2, 1.04, alpha, 100, 100, 21).back();
    const std::string text = save(c, 99, 4567);
    std::istringstream in(text);
    const Snapshot s = load_snapshot(in);
    EXPECT_EQ(s.seed, 99u);
    EXPECT_EQ(s.sweep, 4567);
    EXPECT_EQ(s.config.lattice().kind(), kind);
    EXPECT_EQ(s.config.l(), c.l());
    EXPECT_EQ(s.config.alpha(), c.alpha());
    for (int i = 0; i < c.lattice().site_count(); ++i) EXPECT_EQ(s.config.position(i), c.position(i));
    EXPECT_EQ(save(s.config, 99, 4567), text);
  }
}

TEST(Snapshot, ReloadedStateHasTheSameAdmissibilityReport) {
  const Configuration c = oracle::chain_samples(LatticeKind::FCC, 2, 1.05, 0.1, 200, 100, 8).back();
  const auto path = std::filesystem::temp_directory_path() / "nearlattice_test_fcc.snap";
  save_snapshot(path, c, 1, 2);
  const Snapshot s = load_snapshot(path);
  std::filesystem::remove(path);
  const auto a = check_admissibility(c);
  const auto b = check_admissibility(s.config);
  EXPECT_TRUE(a.overall());
  EXPECT_EQ(a.overall(), b.overall());
  EXPECT_EQ(a.first_failure(), b.first_failure());
  EXPECT_EQ(a.omega1.witnesses.size(), b.omega1.witnesses.size());
}

TEST(Snapshot, TruncatedFileNamesTheLine) {
  const auto lat = std::make_shared<const Lattice>(Lattice::build(LatticeKind::Triangular2D, 3));
  std::string text = save(scaled_lattice_config(lat, 1.05, 0.15));
  // Header is 8 lines; keep 4 site lines.
  std::size_t cut = 0;
  for (int i = 0; i < 12; ++i) cut = text.find('\n', cut) + 1;
  const Error e = load_error(text.substr(0, cut));
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("line 13"), std::string::npos) << e.what();
}

TEST(Snapshot, MalformedInputs) {
  const auto lat = std::make_shared<const Lattice>(Lattice::build(LatticeKind::Triangular2D, 3));
  const std::string good = save(scaled_lattice_config(lat, 1.05, 0.15));

  std::string v2 = good;
  v2.replace(v2.find(" 1\n"), 3, " 2\n");
  EXPECT_EQ(load_error(v2).code(), ErrorCode::VersionMismatch);

  EXPECT_EQ(load_error("hello 1\n").code(), ErrorCode::ParseError);
  EXPECT_EQ(load_error("").code(), ErrorCode::ParseError);

  std::string bad_number = good;
  bad_number.replace(bad_number.find("l 1.05"), 6, "l 1.o5");
  const Error e = load_error(bad_number);
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();

  std::string bad_kind = good;
  bad_kind.replace(bad_kind.find("TRIANGULAR2D"), 12, "SQUARE");
  EXPECT_EQ(load_error(bad_kind).code(), ErrorCode::ParseError);

  std::string out_of_scale = good;
  out_of_scale.replace(out_of_scale.find("l 1.05"), 6, "l 1.50");
  EXPECT_EQ(load_error(out_of_scale).code(), ErrorCode::ParseError);
}
