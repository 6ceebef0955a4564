#include "l2track/sketch_io.hpp"

#include <cstring>
#include <stdexcept>

namespace l2track {

namespace {

constexpr char kMagic[4] = {'L', '2', 'T', 'K'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i64(std::vector<std::uint8_t>& out, i64 v) {
  put_u64(out, static_cast<u64>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  u64 read_u64() {
    need(8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  i64 read_i64() { return static_cast<i64>(read_u64()); }

  void magic() {
    need(4);
    if (std::memcmp(data_.data() + pos_, kMagic, 4) != 0)
      throw std::runtime_error("sketch blob: bad magic");
    pos_ += 4;
  }

  void done() const {
    if (pos_ != data_.size()) throw std::runtime_error("sketch blob: trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw std::runtime_error("sketch blob: truncated");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void append_replica(std::vector<std::uint8_t>& out, const CountSketch<i64>& sketch) {
  if (!sketch.seed())
    throw std::invalid_argument("serialize: sketch was not built from a seed");
  put_u64(out, *sketch.seed());
  for (i64 c : sketch.counters()) put_i64(out, c);
}

std::vector<std::uint8_t> serialize_replicas(u64 k,
                                             std::span<const CountSketch<i64>> replicas) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 2 + 16 + replicas.size() * (8 + 8 * k));
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, kVersion);
  put_u64(out, k);
  put_u64(out, replicas.size());
  for (const auto& rep : replicas) append_replica(out, rep);
  return out;
}

}  // namespace

std::vector<std::uint8_t> serialize(const CountSketch<i64>& sketch) {
  return serialize_replicas(sketch.rows(), {&sketch, 1});
}

std::vector<std::uint8_t> serialize(const MedianTracker<i64>& tracker) {
  return serialize_replicas(tracker.rows(), tracker.replicas());
}

MedianTracker<i64> deserialize_tracker(std::span<const std::uint8_t> blob) {
  Reader r(blob);
  r.magic();
  if (r.u16() != kVersion) throw std::runtime_error("sketch blob: unsupported version");
  const u64 k = r.read_u64();
  const u64 count = r.read_u64();
  if (count == 0 || count % 2 == 0)
    throw std::runtime_error("sketch blob: replica count must be odd");
  std::vector<CountSketch<i64>> replicas;
  replicas.reserve(count);
  std::vector<i64> counters(k);
  for (u64 i = 0; i < count; ++i) {
    const u64 seed = r.read_u64();
    for (u64 j = 0; j < k; ++j) counters[j] = r.read_i64();
    CountSketch<i64> sketch(k, seed);
    sketch.restore_counters(counters);
    replicas.push_back(std::move(sketch));
  }
  r.done();
  return MedianTracker<i64>(std::move(replicas));
}

CountSketch<i64> deserialize_count_sketch(std::span<const std::uint8_t> blob) {
  MedianTracker<i64> tracker = deserialize_tracker(blob);
  if (tracker.replica_count() != 1)
    throw std::runtime_error("sketch blob: expected a single sketch (r = 1)");
  return tracker.replicas()[0];
}

}  // namespace l2track
