#include "precedence/preparation.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "precedence/error.hpp"
#include "precedence/freedom_count.hpp"

namespace precedence::ledger {
namespace {

void append_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // folds -0.0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  out += buf;
}

void append_matrix(std::string& out, const qcore::Matrix& m) {
  out += std::to_string(m.rows());
  out += 'x';
  out += std::to_string(m.cols());
  out += ':';
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != 0 || j != 0) out += ',';
      append_number(out, m(i, j).real());
      out += ',';
      append_number(out, m(i, j).imag());
    }
}

void append_spec(std::string& out, const PreparationSpec& spec) {
  out += "prep{dim=";
  out += std::to_string(spec.dim);
  out += ";initial=";
  out += std::to_string(spec.initial);
  out += ";steps=[";
  for (std::size_t k = 0; k < spec.steps.size(); ++k) {
    if (k) out += ';';
    std::visit(
        [&out](const auto& step) {
          using T = std::decay_t<decltype(step)>;
          if constexpr (std::is_same_v<T, TransformStep>) {
            out += "transform(";
            append_matrix(out, step.unitary);
          } else if constexpr (std::is_same_v<T, ProjectStep>) {
            out += "project(";
            append_matrix(out, step.filter);
          } else {
            out += "compose(";
            if (!step.other) throw Error(ErrorCode::invalid_argument, "preparation: empty compose step");
            append_spec(out, *step.other);
          }
          out += ')';
        },
        spec.steps[k]);
  }
  out += "]}";
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw Error(ErrorCode::parse, "digest: expected 64 hex characters");
  Digest d;
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::parse, "digest: invalid hex character");
    d.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return d;
}

Digest Digest::of(std::string_view data) {
  Digest d;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32)
    throw Error(ErrorCode::invalid_state, "digest: SHA-256 failed");
  return d;
}

std::size_t output_dim(const PreparationSpec& spec) {
  std::size_t dim = spec.dim;
  for (const auto& step : spec.steps)
    if (const auto* c = std::get_if<ComposeStep>(&step); c && c->other) dim *= output_dim(*c->other);
  return dim;
}

qcore::DensityMatrix replay(const PreparationSpec& spec) {
  if (spec.dim == 0) throw Error(ErrorCode::invalid_argument, "preparation: zero dimension");
  if (spec.initial >= spec.dim) throw Error(ErrorCode::invalid_argument, "preparation: initial index out of range");
  qcore::DensityMatrix rho = qcore::DensityMatrix::basis(spec.dim, spec.initial);
  for (const auto& step : spec.steps) {
    std::visit(
        [&rho](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, TransformStep>) {
            rho = qcore::transform(rho, qcore::UnitaryTransform::from_matrix(s.unitary));
          } else if constexpr (std::is_same_v<T, ProjectStep>) {
            rho = qcore::project(rho, s.filter);
          } else {
            if (!s.other) throw Error(ErrorCode::invalid_argument, "preparation: empty compose step");
            rho = qcore::compose(rho, replay(*s.other));
          }
        },
        step);
  }
  return rho;
}

PreparationSpec spec_for_pure_state(const qcore::PureState& psi) {
  PreparationSpec spec;
  spec.dim = psi.dim();
  spec.initial = 0;
  const auto u = freedom::transitivity_witness(qcore::PureState::basis(psi.dim(), 0), psi);
  spec.steps.push_back(TransformStep{u.matrix()});
  return spec;
}

std::string canonical_serialization(const PreparationSpec& spec) {
  std::string out;
  append_spec(out, spec);
  return out;
}

std::string canonical_serialization(const qcore::Povm& povm) {
  std::string out = "povm{effects=[";
  for (std::size_t k = 0; k < povm.n_outcomes(); ++k) {
    if (k) out += ';';
    append_matrix(out, povm.effects()[k]);
  }
  out += "]}";
  return out;
}

std::string canonical_serialization(const qcore::DensityMatrix& rho) {
  std::string out = "state{";
  append_matrix(out, rho.matrix());
  out += '}';
  return out;
}

const char* to_string(KeyMode mode) noexcept {
  return mode == KeyMode::syntactic ? "syntactic" : "semantic";
}

KeyMode key_mode_from_string(std::string_view s) {
  if (s == "syntactic") return KeyMode::syntactic;
  if (s == "semantic") return KeyMode::semantic;
  throw Error(ErrorCode::invalid_argument, "unknown key mode '" + std::string(s) + "'");
}

PreparationKey canonical_key(const PreparationSpec& spec, KeyMode mode) {
  const qcore::DensityMatrix rho = replay(spec);
  if (mode == KeyMode::semantic) return PreparationKey{Digest::of(canonical_serialization(rho))};
  return PreparationKey{Digest::of(canonical_serialization(spec))};
}

MeasurementKey measurement_key(const qcore::Povm& povm) {
  return MeasurementKey{Digest::of(canonical_serialization(povm))};
}

}  // namespace precedence::ledger
