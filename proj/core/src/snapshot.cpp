#include "nearlattice/snapshot.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <vector>

#include "nearlattice/error.hpp"

namespace nearlattice {

namespace {

constexpr std::string_view kMagic = "nearlattice-snapshot";

[[noreturn]] void parse_fail(long line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r') ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Int>
Int parse_int(std::string_view text, long line) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) parse_fail(line, "bad integer '" + std::string(text) + "'");
  return value;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> next(const char* expected) {
    if (!std::getline(in_, buffer_)) parse_fail(line_ + 1, std::string("unexpected end of file, expected ") + expected);
    ++line_;
    return split_ws(buffer_);
  }
  long line() const { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  long line_ = 0;
};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "bad number '" + std::string(text) + "'");
  }
  return value;
}

void save_snapshot(std::ostream& out, const Configuration& c, std::uint64_t seed, long sweep) {
  const Lattice& lat = c.lattice();
  out << kMagic << ' ' << kSnapshotVersion << '\n';
  out << "lattice " << to_string(lat.kind()) << '\n';
  out << "n " << lat.n() << '\n';
  out << "l " << format_double(c.l()) << '\n';
  out << "alpha " << format_double(c.alpha()) << '\n';
  out << "seed " << seed << '\n';
  out << "sweep " << sweep << '\n';
  out << "sites " << lat.site_count() << '\n';
  for (int i = 0; i < lat.site_count(); ++i) {
    const Site& s = lat.sites()[static_cast<std::size_t>(i)];
    const Point& p = c.position(i);
    out << s.coord.x() << ' ' << s.coord.y() << ' ' << s.coord.z() << ' ' << s.basis << ' ' << format_double(p.x())
        << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  }
}

void save_snapshot(const std::filesystem::path& path, const Configuration& c, std::uint64_t seed, long sweep) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  save_snapshot(out, c, seed, sweep);
}

Snapshot load_snapshot(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next("snapshot header");
  if (header.size() != 2 || header[0] != kMagic) parse_fail(reader.line(), "not a nearlattice snapshot");
  const int version = parse_int<int>(header[1], reader.line());
  if (version != kSnapshotVersion) {
    throw Error(ErrorCode::VersionMismatch, "snapshot version " + std::to_string(version) + " is not supported");
  }

  auto field = [&](std::string_view key) {
    auto tokens = reader.next(std::string(key).c_str());
    if (tokens.size() != 2 || tokens[0] != key) parse_fail(reader.line(), "expected '" + std::string(key) + " <value>'");
    return tokens[1];
  };
  auto number = [&](std::string_view text) {
    try {
      return parse_double(text);
    } catch (const Error&) {
      parse_fail(reader.line(), "bad number '" + std::string(text) + "'");
    }
  };

  LatticeKind kind;
  try {
    kind = parse_lattice_kind(field("lattice"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    parse_fail(reader.line(), "unknown lattice kind");
  }
  const int n = parse_int<int>(field("n"), reader.line());
  if (n < 1) parse_fail(reader.line(), "n must be >= 1");
  const double l = number(field("l"));
  const double alpha = number(field("alpha"));
  const auto seed = parse_int<std::uint64_t>(field("seed"), reader.line());
  const long sweep = parse_int<long>(field("sweep"), reader.line());
  const int sites = parse_int<int>(field("sites"), reader.line());

  auto lattice = std::make_shared<const Lattice>(Lattice::build(kind, n));
  if (sites != lattice->site_count()) parse_fail(reader.line(), "site count does not match the lattice");

  std::vector<Point> positions(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) {
    auto tokens = reader.next("site line");
    if (tokens.size() != 7) parse_fail(reader.line(), "site line needs 7 fields");
    const Site& s = lattice->sites()[static_cast<std::size_t>(i)];
    const Offset coord(parse_int<int>(tokens[0], reader.line()), parse_int<int>(tokens[1], reader.line()),
                       parse_int<int>(tokens[2], reader.line()));
    const int basis = parse_int<int>(tokens[3], reader.line());
    if (coord != s.coord || basis != s.basis) parse_fail(reader.line(), "site coordinates out of canonical order");
    positions[static_cast<std::size_t>(i)] = Point(number(tokens[4]), number(tokens[5]), number(tokens[6]));
  }
  try {
    return Snapshot{Configuration(std::move(lattice), std::move(positions), l, alpha), seed, sweep};
  } catch (const Error& e) {
    parse_fail(reader.line(), e.what());
  }
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return load_snapshot(in);
}

}  // namespace nearlattice
