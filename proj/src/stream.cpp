#include "l2track/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "l2track/hash.hpp"

namespace l2track {

namespace {

constexpr u64 kU64Max = std::numeric_limits<u64>::max();

u64 checked_add(u64 a, u64 b, const char* what) {
  if (b > kU64Max - a) throw std::invalid_argument(what);
  return a + b;
}

u64 checked_mul(u64 a, u64 b, const char* what) {
  const u128 p = static_cast<u128>(a) * b;
  if (p > kU64Max) throw std::invalid_argument(what);
  return static_cast<u64>(p);
}

// Uniform draw from [0, n) via the 128-bit multiply trick; bias <= n / 2^64.
u64 bounded(u64 word, u64 n) {
  return static_cast<u64>((static_cast<u128>(word) * n) >> 64);
}

double unit_interval(u64 word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

}  // namespace

void Stream::append(u64 item, u64 count) {
  if (count == 0) return;
  length = checked_add(length, count, "Stream: length overflows 64 bits");
  if (!runs.empty() && runs.back().item == item)
    runs.back().count = checked_add(runs.back().count, count, "Stream: run overflows");
  else
    runs.push_back({item, count});
}

bool same_items(const Stream& a, const Stream& b) {
  if (a.length != b.length) return false;
  std::size_t ia = 0, ib = 0;
  u64 ca = 0, cb = 0;  // consumed within current run
  while (ia < a.runs.size() && ib < b.runs.size()) {
    if (a.runs[ia].item != b.runs[ib].item) return false;
    const u64 left_a = a.runs[ia].count - ca;
    const u64 left_b = b.runs[ib].count - cb;
    const u64 step = std::min(left_a, left_b);
    ca += step;
    cb += step;
    if (ca == a.runs[ia].count) { ++ia; ca = 0; }
    if (cb == b.runs[ib].count) { ++ib; cb = 0; }
  }
  return ia == a.runs.size() && ib == b.runs.size();
}

Stream gen_distinct(u64 m) {
  if (m < 1) throw std::invalid_argument("gen_distinct: m must be >= 1");
  Stream s;
  s.runs.reserve(m);
  for (u64 t = 1; t <= m; ++t) s.runs.push_back({t, 1});
  s.length = m;
  return s;
}

std::vector<u64> ams_checkpoints(double eps, u64 ell) {
  if (!(eps > 0.0) || !(eps <= 0.1))
    throw std::invalid_argument("ams_checkpoints: eps must be in (0, 0.1]");
  if (ell < 1) throw std::invalid_argument("ams_checkpoints: ell must be >= 1");
  const double base_d = std::ceil(10.0 / eps);
  const u64 base = static_cast<u64>(base_d);
  std::vector<u64> times;
  times.reserve(ell);
  u64 delta = 1;
  u64 t = 0;
  for (u64 j = 1; j <= ell; ++j) {
    delta = checked_mul(delta, base, "ams_checkpoints: time overflows 64 bits");
    t = checked_add(t, delta, "ams_checkpoints: time overflows 64 bits");
    times.push_back(t);
  }
  return times;
}

u64 ams_ell_for_length(double eps, u64 m) {
  u64 ell = 0;
  for (;;) {
    std::vector<u64> times;
    try {
      times = ams_checkpoints(eps, ell + 1);
    } catch (const std::invalid_argument&) {
      return ell;  // next checkpoint overflows, so it certainly exceeds m
    }
    if (times.back() > m) return ell;
    ++ell;
  }
}

Stream gen_ams_hard(double eps, u64 ell) {
  auto times = ams_checkpoints(eps, ell);
  Stream s = gen_distinct(times.back());
  s.checkpoints = std::move(times);
  return s;
}

Stream gen_cs_hard(double eps, u64 ell) {
  if (!(eps > 0.0) || !(eps <= 0.5))
    throw std::invalid_argument("gen_cs_hard: eps must be in (0, 0.5]");
  if (ell < 1) throw std::invalid_argument("gen_cs_hard: ell must be >= 1");
  const u64 delta = static_cast<u64>(std::ceil(100.0 / eps));
  const u64 w = static_cast<u64>(std::ceil(1.0 / eps));
  Stream s;
  s.runs.reserve(w * ell);
  u64 block_count = 1;
  u64 next_item = 1;
  for (u64 j = 1; j <= ell; ++j) {
    block_count = checked_mul(block_count, delta, "gen_cs_hard: stream length overflows");
    for (u64 i = 0; i < w; ++i) s.append(next_item++, block_count);
    s.checkpoints.push_back(s.length);
  }
  return s;
}

Stream gen_uniform(u64 n, u64 m, u64 seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("gen_uniform: n and m must be >= 1");
  std::mt19937_64 gen(seed);
  Stream s;
  for (u64 t = 0; t < m; ++t) s.append(1 + bounded(gen(), n));
  return s;
}

Stream gen_zipf(u64 n, u64 m, double alpha, u64 seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("gen_zipf: n and m must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("gen_zipf: alpha must be positive");
  std::vector<double> cdf(n);
  long double total = 0.0L;
  for (u64 i = 1; i <= n; ++i) {
    total += std::pow(static_cast<long double>(i), -static_cast<long double>(alpha));
    cdf[i - 1] = static_cast<double>(total);
  }
  const double norm = static_cast<double>(total);
  for (auto& c : cdf) c /= norm;
  cdf.back() = 1.0;

  std::mt19937_64 gen(seed);
  Stream s;
  for (u64 t = 0; t < m; ++t) {
    const double u = unit_interval(gen());
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    s.append(1 + static_cast<u64>(it - cdf.begin()));
  }
  return s;
}

Stream read_stream(std::istream& in) {
  Stream s;
  std::string line;
  u64 line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;  // blank line
    if (line[begin] == '#') continue;          // comment
    const std::size_t end = line.find_last_not_of(" \t") + 1;
    u64 value = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + begin, line.data() + end, value);
    if (ec != std::errc{} || ptr != line.data() + end)
      throw std::runtime_error("stream parse error at line " + std::to_string(line_no) +
                               ": expected a decimal item id");
    if (value >= KWiseHash::kPrime)
      throw std::runtime_error("stream range error at line " + std::to_string(line_no) +
                               ": id must be below 2^61-1");
    s.append(value);
  }
  return s;
}

Stream read_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stream file: " + path);
  return read_stream(in);
}

void write_stream(const Stream& s, std::ostream& out) {
  char buf[24];
  for (const Run& r : s.runs) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r.item);
    *ptr = '\n';
    const std::size_t len = static_cast<std::size_t>(ptr - buf) + 1;
    for (u64 c = 0; c < r.count; ++c) out.write(buf, static_cast<std::streamsize>(len));
  }
}

void write_stream_file(const Stream& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_stream(s, out);
}

Stream StreamSpec::build() const {
  switch (family) {
    case Family::kDistinct:
      return gen_distinct(m);
    case Family::kUniform:
      return gen_uniform(n, m, seed);
    case Family::kZipf:
      return gen_zipf(n, m, alpha, seed);
    case Family::kAmsHard:
      return gen_ams_hard(eps, ell);
    case Family::kCsHardBlocks:
      return gen_cs_hard(eps, ell);
    case Family::kFile:
      return read_stream_file(path);
  }
  throw std::invalid_argument("StreamSpec: unknown family");
}

}  // namespace l2track
