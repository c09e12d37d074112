#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "bgt/errors.hpp"
#include "bgt/model.hpp"

namespace bgt {

using nlohmann::json;

std::string to_json_string(const GTInstance& inst) {
  json j;
  j["n"] = inst.n;
  j["k"] = inst.k;
  j["alpha"] = inst.alpha;
  j["C"] = inst.C;
  j["q"] = inst.q;
  j["N"] = inst.N;
  j["sigma_star"] = inst.sigma_star;
  j["tests"] = inst.tests;
  std::vector<bool> out(inst.outcomes.begin(), inst.outcomes.end());
  j["outcomes"] = out;
  j["seed"] = inst.seed;
  return j.dump();
}

GTInstance instance_from_json_string(const std::string& text) {
  const json j = json::parse(text);
  GTInstance inst;
  inst.n = j.at("n").get<std::uint64_t>();
  inst.k = j.at("k").get<std::uint64_t>();
  inst.alpha = j.at("alpha").get<double>();
  inst.C = j.at("C").get<double>();
  inst.q = j.at("q").get<double>();
  inst.N = j.at("N").get<std::uint64_t>();
  inst.sigma_star = j.at("sigma_star").get<std::vector<std::uint32_t>>();
  inst.tests = j.at("tests").get<std::vector<std::vector<std::uint32_t>>>();
  for (bool b : j.at("outcomes").get<std::vector<bool>>()) inst.outcomes.push_back(b ? 1 : 0);
  inst.seed = j.at("seed").get<std::uint64_t>();
  validate(inst);
  return inst;
}

namespace {

constexpr char kMagic[4] = {'B', 'G', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw DomainError("read_binary: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_binary(std::ostream& os, const GTInstance& inst) {
  os.write(kMagic, 4);
  put_u64(os, inst.n);
  put_u64(os, inst.k);
  put_u64(os, inst.N);
  put_u64(os, inst.seed);
  const std::size_t row_bytes = (inst.n + 7) / 8;
  std::vector<unsigned char> row(row_bytes);
  for (const auto& test : inst.tests) {
    std::fill(row.begin(), row.end(), 0);
    for (auto i : test) row[i >> 3] |= static_cast<unsigned char>(1U << (i & 7));
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_bytes));
  }
  for (auto i : inst.sigma_star) put_u64(os, i);
  put_u64(os, std::bit_cast<std::uint64_t>(inst.alpha));
  put_u64(os, std::bit_cast<std::uint64_t>(inst.C));
}

GTInstance read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DomainError("read_binary: bad magic (expected BGT1)");
  }
  GTInstance inst;
  inst.n = get_u64(is);
  inst.k = get_u64(is);
  inst.N = get_u64(is);
  inst.seed = get_u64(is);
  if (inst.k < 1 || inst.k > inst.n) throw DomainError("read_binary: bad header");
  const std::size_t row_bytes = (inst.n + 7) / 8;
  std::vector<unsigned char> row(row_bytes);
  inst.tests.resize(inst.N);
  for (auto& test : inst.tests) {
    if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_bytes))) {
      throw DomainError("read_binary: truncated membership rows");
    }
    for (std::uint64_t i = 0; i < inst.n; ++i) {
      if (row[i >> 3] >> (i & 7) & 1U) test.push_back(static_cast<std::uint32_t>(i));
    }
  }
  inst.sigma_star.resize(inst.k);
  for (auto& i : inst.sigma_star) i = static_cast<std::uint32_t>(get_u64(is));
  inst.alpha = std::bit_cast<double>(get_u64(is));
  inst.C = std::bit_cast<double>(get_u64(is));
  inst.q = assignment_prob(inst.k);
  std::vector<std::uint8_t> infected(inst.n, 0);
  for (auto i : inst.sigma_star) {
    if (i >= inst.n) throw DomainError("read_binary: planted index out of range");
    infected[i] = 1;
  }
  inst.outcomes.assign(inst.N, 0);
  for (std::size_t j = 0; j < inst.N; ++j) {
    for (auto i : inst.tests[j]) {
      if (infected[i]) {
        inst.outcomes[j] = 1;
        break;
      }
    }
  }
  return inst;
}

}  // namespace bgt
