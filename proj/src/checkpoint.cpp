#include "mshine/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "mshine/error.hpp"

namespace mshine {

namespace {

constexpr char kMagic[5] = {'M', 'S', 'H', 'N', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put_f32(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

void put_strings(std::ostream& out, const std::vector<std::string>& values) {
  put_u64(out, values.size());
  for (const auto& s : values) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw DataError("checkpoint is truncated");
    }
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  double f32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return static_cast<double>(std::bit_cast<float>(v));
  }
  std::vector<std::string> strings() {
    auto count = u64();
    std::vector<std::string> out;
    for (std::uint64_t i = 0; i < count; ++i) {
      auto len = u64();
      if (len > (1u << 20)) throw DataError("checkpoint string too long");
      std::string s(len, '\0');
      bytes(s.data(), len);
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& file, const ModelParams& params,
                     const std::vector<std::string>& labels,
                     const std::vector<std::string>& path_ids) {
  if (labels.size() != params.num_nodes() || path_ids.size() != params.num_paths()) {
    throw std::invalid_argument("checkpoint tables do not match the model");
  }
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    put_u64(out, params.num_nodes());
    put_u64(out, params.dim());
    put_u64(out, params.num_triple_types());
    put_u64(out, params.num_paths());
    for (const auto* t : params.tensors()) {
      for (double v : t->data()) put_f32(out, v);
    }
    put_strings(out, labels);
    put_strings(out, path_ids);
    if (!out.flush()) throw DataError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + file.string());
  Reader r(in);
  char magic[5];
  r.bytes(magic, 5);
  if (!std::equal(magic, magic + 5, kMagic)) {
    throw DataError(file.string() + " is not an MSHN1 checkpoint");
  }
  const auto n = r.u64();
  const auto d = r.u64();
  const auto triples = r.u64();
  const auto paths = r.u64();
  if (n == 0 || d == 0 || d > 65536 || n > (1ull << 32)) {
    throw DataError("checkpoint header has implausible sizes");
  }

  Checkpoint ck;
  auto& p = ck.params;
  p.basic = Table(n, d);
  p.state = Table(n, d);
  p.target = Table(n, d);
  p.w_xh = Table(d, d);
  p.w_hh = Table(d, d);
  p.w_rh = Table(d, d);
  p.relation = Table(triples, d);
  p.decode_x = Table(paths, d);
  p.decode_h = Table(paths, d);
  p.decode_y = Table(paths, d);
  for (auto* t : p.tensors()) {
    for (auto& v : t->data()) v = r.f32();
  }
  ck.labels = r.strings();
  ck.path_ids = r.strings();
  if (ck.labels.size() != n || ck.path_ids.size() != paths) {
    throw DataError("checkpoint label tables do not match its header");
  }
  return ck;
}

ModelParams round_to_f32(ModelParams params) {
  for (auto* t : params.tensors()) {
    for (auto& v : t->data()) v = static_cast<double>(static_cast<float>(v));
  }
  return params;
}

}  // namespace mshine
