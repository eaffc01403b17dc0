#include "mclab/sample_sequence.hpp"

#include <sstream>
#include <stdexcept>

namespace mclab {

const char* to_string(Distribution d) {
  switch (d) {
    case Distribution::ComplexGaussian: return "complex";
    case Distribution::RealGaussian: return "real";
    case Distribution::Rademacher: return "pm1";
  }
  return "?";
}

Distribution distribution_from_string(const std::string& s) {
  if (s == "complex") return Distribution::ComplexGaussian;
  if (s == "real") return Distribution::RealGaussian;
  if (s == "pm1") return Distribution::Rademacher;
  throw std::invalid_argument("unknown distribution '" + s +
                              "' (expected complex|real|pm1)");
}

void Conditioning::set(std::uint32_t k, int sign) {
  if (k == 0) throw std::invalid_argument("conditioning index must be >= 1");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("conditioning sign must be +1 or -1");
  if (!signs_.emplace(k, sign).second)
    throw std::invalid_argument("duplicate conditioning index " +
                                std::to_string(k));
}

Conditioning Conditioning::parse(const std::string& text) {
  Conditioning c;
  if (text.empty()) return c;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("malformed conditioning token '" + tok +
                                  "' (expected k:+1 or k:-1)");
    const std::string ks = tok.substr(0, colon);
    const std::string vs = tok.substr(colon + 1);
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(ks, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed conditioning index '" + ks + "'");
    }
    if (used != ks.size() || k == 0 || k > 0xFFFFFFFFull)
      throw std::invalid_argument("malformed conditioning index '" + ks + "'");
    int sign = 0;
    if (vs == "+1" || vs == "1")
      sign = 1;
    else if (vs == "-1")
      sign = -1;
    else
      throw std::invalid_argument("malformed conditioning sign '" + vs +
                                  "' (expected +1 or -1)");
    c.set(static_cast<std::uint32_t>(k), sign);
  }
  return c;
}

std::string Conditioning::to_string() const {
  std::string out;
  for (const auto& [k, s] : signs_) {
    if (!out.empty()) out += ',';
    out += std::to_string(k);
    out += s > 0 ? ":+1" : ":-1";
  }
  return out;
}

bool Conditioning::all_even() const {
  for (const auto& [k, s] : signs_) {
    (void)s;
    if (k % 2 != 0) return false;
  }
  return true;
}

void Conditioning::require_within(std::uint32_t n) const {
  for (const auto& [k, s] : signs_) {
    (void)s;
    if (k < 1 || k > n)
      throw std::invalid_argument("conditioned index " + std::to_string(k) +
                                  " outside [1, " + std::to_string(n) + "]");
  }
}

}  // namespace mclab
