#include "aide/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace aide::net {

namespace {

constexpr char kMagic[8] = {'A', 'I', 'D', 'E', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_named_tensor(std::ostream& out, const std::string& name,
                        const Tensor& t) {
  write_u32(out, std::uint32_t(name.size()));
  out.write(name.data(), std::streamsize(name.size()));
  write_u32(out, std::uint32_t(t.dims.size()));
  for (int d : t.dims) write_u32(out, std::uint32_t(d));
  out.write(reinterpret_cast<const char*>(t.data.data()),
            std::streamsize(t.data.size() * sizeof(double)));
}

void read_into_tensor(std::istream& in, const std::string& expect_name,
                      Tensor& t) {
  const std::uint32_t name_len = read_u32(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  if (name != expect_name)
    throw std::runtime_error("checkpoint tensor order mismatch: expected " +
                             expect_name + ", found " + name);
  const std::uint32_t ndims = read_u32(in);
  std::vector<int> dims(ndims);
  for (auto& d : dims) d = int(read_u32(in));
  if (dims != t.dims)
    throw std::runtime_error("checkpoint tensor shape mismatch for " + name);
  in.read(reinterpret_cast<char*>(t.data.data()),
          std::streamsize(t.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint reading " + name);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, UNet& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_u32(out, kVersion);
  const auto& arch = model.arch();
  write_u32(out, std::uint32_t(arch.base_channels));
  write_u32(out, std::uint32_t(arch.depth));
  write_u32(out, std::uint32_t(arch.modality_streams));
  write_u64(out, model.seed());

  const auto params = model.params();
  const auto buffers = model.buffers();
  write_u32(out, std::uint32_t(params.size()));
  for (const auto& p : params) write_named_tensor(out, p.name, *p.value);
  write_u32(out, std::uint32_t(buffers.size()));
  for (const auto& b : buffers) write_named_tensor(out, b.name, *b.value);
  if (!out)
    throw std::runtime_error("failed writing checkpoint: " + path.string());
}

std::unique_ptr<UNet> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("not an AIDE checkpoint: " + path.string());
  const std::uint32_t version = read_u32(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version");

  ArchConfig arch;
  arch.base_channels = int(read_u32(in));
  arch.depth = int(read_u32(in));
  arch.modality_streams = int(read_u32(in));
  const std::uint64_t seed = read_u64(in);

  auto model = std::make_unique<UNet>(arch, seed);
  const auto params = model->params();
  const auto buffers = model->buffers();
  const std::uint32_t n_params = read_u32(in);
  if (n_params != params.size())
    throw std::runtime_error("checkpoint parameter count mismatch");
  for (const auto& p : params) read_into_tensor(in, p.name, *p.value);
  const std::uint32_t n_buffers = read_u32(in);
  if (n_buffers != buffers.size())
    throw std::runtime_error("checkpoint buffer count mismatch");
  for (const auto& b : buffers) read_into_tensor(in, b.name, *b.value);
  return model;
}

}  // namespace aide::net
