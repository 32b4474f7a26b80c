#include <bit>
#include <cstring>
#include <stdexcept>

#include "hcmc/clip_io.hpp"
#include "hcmc/model.hpp"

namespace hcmc {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'H', 'C', 'M', 'C', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  template <class T>
  void pod(const T& v) {
    out_.append(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void str(std::string_view s) {
    pod(static_cast<std::uint64_t>(s.size()));
    out_.append(s);
  }
  void doubles(std::span<const double> v) { out_.append(reinterpret_cast<const char*>(v.data()), v.size_bytes()); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <class T>
  T pod() {
    T v;
    need(sizeof v);
    std::memcpy(&v, in_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void doubles(std::span<double> v) {
    need(v.size_bytes());
    std::memcpy(v.data(), in_.data() + pos_, v.size_bytes());
    pos_ += v.size_bytes();
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw std::invalid_argument("checkpoint truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_bytes(const ModelParams& params) {
  Writer w;
  for (char c : kMagic) w.pod(c);
  w.pod(kCheckpointVersion);
  w.str(config_to_json(params.config()));
  w.pod(static_cast<std::uint64_t>(params.tensors().size()));
  for (const auto& t : params.tensors()) {
    w.str(t.name);
    w.pod(static_cast<std::uint64_t>(t.rows));
    w.pod(static_cast<std::uint64_t>(t.cols));
  }
  w.pod(params.optimizer().step);
  w.doubles(params.values());
  w.doubles(params.optimizer().m);
  w.doubles(params.optimizer().v);
  return w.take();
}

ModelParams checkpoint_from_bytes(std::string_view bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.pod<char>() != c) throw std::invalid_argument("not an hcmc checkpoint");
  }
  if (const auto version = r.pod<std::uint32_t>(); version != kCheckpointVersion) {
    throw std::invalid_argument("unsupported checkpoint version " + std::to_string(version));
  }
  ModelParams params(config_from_json(r.str()));
  const auto n_tensors = r.pod<std::uint64_t>();
  if (n_tensors != params.tensors().size()) throw std::invalid_argument("checkpoint tensor table mismatch");
  for (const auto& t : params.tensors()) {
    const auto name = r.str();
    const auto rows = r.pod<std::uint64_t>();
    const auto cols = r.pod<std::uint64_t>();
    if (name != t.name || rows != t.rows || cols != t.cols) {
      throw std::invalid_argument("checkpoint tensor '" + name + "' does not match the configured layout");
    }
  }
  params.optimizer().step = r.pod<std::uint64_t>();
  r.doubles(params.values());
  r.doubles(params.optimizer().m);
  r.doubles(params.optimizer().v);
  if (!r.done()) throw std::invalid_argument("trailing bytes after checkpoint");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  write_text_file(path, checkpoint_bytes(params));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_bytes(read_text_file(path));
}

}  // namespace hcmc
