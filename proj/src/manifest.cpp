#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <json.hpp>

#include "mshine/cli.hpp"
#include "mshine/error.hpp"

namespace mshine {

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  j["seed"] = seed;
  j["deterministic"] = deterministic;
  j["config"] = config;
  auto& in = j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [name, d] : inputs) in[name] = {{"path", d.path}, {"sha256", d.sha256}};
  j["metapaths"] = metapaths;
  j["outputs"] = outputs;
  j["timings_ms"] = timings_ms;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& file) const {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << to_json();
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace mshine
