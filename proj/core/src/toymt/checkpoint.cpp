// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "prefalign/error.hpp"
#include "prefalign/toymt/model.hpp"

namespace prefalign::toymt {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'F', 'A', 'L', 'M', 'D', 'L', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError("checkpoint truncated at " + what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const ToyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  const std::string json = model.config().to_json();
  put_u64(out, json.size());
  out.write(json.data(), static_cast<std::streamsize>(json.size()));
  put_u64(out, model.params().size());
  for (double p : model.params()) put_u64(out, std::bit_cast<std::uint64_t>(p));
  if (!out) throw InputError("failed writing checkpoint " + path.string());
}

ToyModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not a model checkpoint: " + path.string());
  }
  const std::uint64_t json_len = get_u64(in, "config length");
  if (json_len > (1u << 20)) throw ParseError("checkpoint config too large");
  std::string json(json_len, '\0');
  if (!in.read(json.data(), static_cast<std::streamsize>(json_len))) {
    throw ParseError("checkpoint truncated in config");
  }
  const ModelConfig config = ModelConfig::from_json(json);
  const std::uint64_t count = get_u64(in, "parameter count");
  if (count != config.param_count()) {
    throw ParseError("checkpoint parameter count " + std::to_string(count) +
                     " does not match its config");
  }
  std::vector<double> params(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    params[i] = std::bit_cast<double>(get_u64(in, "parameters"));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes in checkpoint");
  return ToyModel::from_params(config, std::move(params));
}

}  // namespace prefalign::toymt
